#include "crimegrid/features.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "crimegrid/csv.hpp"
#include "crimegrid/errors.hpp"

namespace crimegrid::features {

const std::array<std::string_view, kReportedPoiCategories>& reported_poi_categories() {
    static const std::array<std::string_view, kReportedPoiCategories> cats = {
        "food",
        "arts_entertainment",
        "college_university",
        "nightlife",
        "outdoors_recreation",
        "professional_other",
        "residence",
        "shop_service",
        "travel_transport",
    };
    return cats;
}

int reported_poi_index(int raw_category) {
    // raw order matches poi_categories(); "event" (index 9) folds into
    // professional_other (index 5)
    if (raw_category == 9) return 5;
    return raw_category;
}

char group_letter(Group g) { return static_cast<char>(g); }

Group group_from_letter(char c) {
    switch (c) {
        case 'R': return Group::R;
        case 'D': return Group::D;
        case 'S': return Group::S;
        case 'F': return Group::F;
        case 'P': return Group::P;
    }
    throw DataError(std::string("unknown feature group '") + c + "'");
}

std::size_t FeatureSchema::count(Group g) const {
    std::size_t n = 0;
    for (const auto& c : columns)
        if (c.group == g) ++n;
    return n;
}

FeatureSchema matrix_schema(const FeatureOptions& opts) {
    FeatureSchema s;
    auto add = [&](std::string name, Group g) { s.columns.push_back({std::move(name), g}); };

    add("month", Group::R);
    add("weekday", Group::R);
    add("interval", Group::R);
    add("season", Group::R);
    add("crime_frequency", Group::R);
    add("crime_density_pop", Group::R);
    add("crime_density_area", Group::R);
    add("crime_season_share", Group::R);

    for (auto col : ingest::demographic_columns()) add(std::string(col), Group::D);

    add("streetlight_count", Group::S);
    add("streetlight_density", Group::S);
    if (opts.include_light_distance) add("avg_min_light_distance_km", Group::S);

    add("checkin_interval_total", Group::F);
    add("checkin_interval_share", Group::F);
    add("visitor_count", Group::F);
    add("region_popularity", Group::F);

    add("poi_total", Group::P);
    for (auto cat : reported_poi_categories()) add("poi_count_" + std::string(cat), Group::P);
    for (auto cat : reported_poi_categories()) add("poi_share_" + std::string(cat), Group::P);
    return s;
}

int CityData::region_index(std::string_view id) const {
    auto it = std::lower_bound(regions.begin(), regions.end(), id,
                               [](const geo::Region& r, std::string_view v) { return r.id < v; });
    if (it == regions.end() || it->id != id) return -1;
    return static_cast<int>(it - regions.begin());
}

MonthWindow CityData::crime_month_span() const {
    if (crimes.empty()) return MonthWindow{0, 0};
    int lo = month_index(crimes.front().year, crimes.front().month);
    int hi = lo;
    for (const auto& c : crimes) {
        int mi = month_index(c.year, c.month);
        lo = std::min(lo, mi);
        hi = std::max(hi, mi);
    }
    return MonthWindow{lo, hi + 1};
}

CityData assemble_city(std::vector<geo::Region> regions,
                       std::span<const ingest::CrimeRecord> crimes,
                       std::span<const ingest::StreetlightPole> lights,
                       std::span<const ingest::PoiVenue> pois,
                       std::span<const ingest::CheckinRecord> checkins,
                       std::span<const ingest::DemographicProfile> demographics,
                       const TimeBinning& binning, int tz_offset_minutes) {
    if (regions.empty()) throw DataError("assemble_city: no regions");
    CityData city;
    city.binning = binning;
    std::sort(regions.begin(), regions.end(),
              [](const geo::Region& a, const geo::Region& b) { return a.id < b.id; });
    city.regions = std::move(regions);

    std::vector<geo::GeoPoint> pts;
    pts.reserve(crimes.size());
    for (const auto& c : crimes) pts.push_back(c.location);
    auto crime_assign = geo::assign_events(pts, city.regions);
    for (std::size_t i = 0; i < crimes.size(); ++i) {
        if (crime_assign.region_index[i] < 0) continue;
        const auto& c = crimes[i];
        city.crimes.push_back(AssignedCrime{crime_assign.region_index[i], c.year, c.month,
                                            c.weekday, c.interval});
        city.crime_points.push_back(c.location);
    }
    city.crimes_unassigned = crime_assign.unassigned_count;

    pts.clear();
    for (const auto& l : lights) pts.push_back(l.location);
    if (!pts.empty()) {
        auto light_assign = geo::assign_events(pts, city.regions);
        city.light_points = std::move(pts);
        city.light_region = std::move(light_assign.region_index);
    }

    pts.clear();
    for (const auto& v : pois) pts.push_back(v.location);
    std::unordered_map<std::string_view, std::int32_t> venue_region;
    if (!pts.empty()) {
        auto poi_assign = geo::assign_events(pts, city.regions);
        for (std::size_t i = 0; i < pois.size(); ++i) {
            std::int32_t region = poi_assign.region_index[i];
            venue_region.emplace(pois[i].id, region);
            if (region < 0) {
                ++city.pois_unassigned;
                continue;
            }
            city.poi_region.push_back(region);
            city.poi_category.push_back(pois[i].category);
        }
    }

    std::unordered_map<std::string_view, std::int32_t> users;
    for (const auto& ck : checkins) {
        auto it = venue_region.find(ck.venue_id);
        if (it == venue_region.end() || it->second < 0) continue;
        DateTime local = tz_offset_minutes ? add_minutes(ck.timestamp, tz_offset_minutes)
                                           : ck.timestamp;
        auto [uit, inserted] = users.emplace(ck.user_id, city.user_count);
        if (inserted) ++city.user_count;
        city.checkins.push_back(AssignedCheckin{it->second, month_index(local.year, local.month),
                                                interval_of_hour(local.hour), uit->second});
    }

    city.demographics.assign(city.regions.size(), {});
    std::vector<bool> covered(city.regions.size(), false);
    for (const auto& d : demographics) {
        int idx = city.region_index(d.region_id);
        if (idx < 0)
            throw DataError("demographics: unknown region id " + d.region_id);
        if (covered[idx])
            throw DataError("demographics: duplicate region id " + d.region_id);
        covered[idx] = true;
        city.demographics[idx] = d.values;
    }
    for (std::size_t i = 0; i < covered.size(); ++i)
        if (!covered[i])
            throw DataError("demographics: missing profile for region " + city.regions[i].id);
    return city;
}

std::vector<HistoricalFeatures> crime_history_features(const CityData& city, MonthWindow window) {
    std::vector<HistoricalFeatures> out(city.regions.size());
    std::vector<std::array<long long, kSeasonCount>> seasonal(city.regions.size(),
                                                              std::array<long long, 4>{});
    std::vector<long long> counts(city.regions.size(), 0);
    for (const auto& c : city.crimes) {
        if (!window.contains(month_index(c.year, c.month))) continue;
        ++counts[c.region];
        ++seasonal[c.region][static_cast<int>(city.binning.season(c.month))];
    }
    for (std::size_t r = 0; r < city.regions.size(); ++r) {
        auto& f = out[r];
        double cr = static_cast<double>(counts[r]);
        f.crime_frequency = cr;
        long long pop = city.regions[r].population;
        f.crime_density_pop = (cr > 0.0 && pop > 0) ? cr / static_cast<double>(pop) : 0.0;
        f.crime_density_area = cr > 0.0 ? cr / city.regions[r].area_km2 : 0.0;
        for (int s = 0; s < kSeasonCount; ++s)
            f.season_share[s] = cr > 0.0 ? static_cast<double>(seasonal[r][s]) / cr : 0.0;
    }
    return out;
}

std::vector<StreetlightFeatures> streetlight_features(const CityData& city,
                                                      MonthWindow crime_window,
                                                      bool with_distance) {
    std::vector<StreetlightFeatures> out(city.regions.size());
    for (std::size_t i = 0; i < city.light_region.size(); ++i) {
        if (city.light_region[i] >= 0) out[city.light_region[i]].count += 1.0;
    }
    for (std::size_t r = 0; r < city.regions.size(); ++r) {
        out[r].density = out[r].count > 0.0 ? out[r].count / city.regions[r].area_km2 : 0.0;
    }
    if (with_distance && !city.light_points.empty()) {
        geo::NearestNeighborIndex index(city.light_points);
        std::vector<double> sums(city.regions.size(), 0.0);
        std::vector<long long> counts(city.regions.size(), 0);
        for (std::size_t i = 0; i < city.crimes.size(); ++i) {
            const auto& c = city.crimes[i];
            if (!crime_window.contains(month_index(c.year, c.month))) continue;
            sums[c.region] += index.nearest_km(city.crime_points[i]);
            ++counts[c.region];
        }
        for (std::size_t r = 0; r < city.regions.size(); ++r)
            out[r].avg_min_crime_distance_km = counts[r] > 0 ? sums[r] / counts[r] : 0.0;
    }
    return out;
}

std::vector<PoiFeatures> poi_features(const CityData& city) {
    std::vector<PoiFeatures> out(city.regions.size());
    for (std::size_t i = 0; i < city.poi_region.size(); ++i) {
        auto& f = out[city.poi_region[i]];
        f.total += 1.0;
        f.count[reported_poi_index(city.poi_category[i])] += 1.0;
    }
    for (std::size_t r = 0; r < city.regions.size(); ++r) {
        auto& f = out[r];
        for (int c = 0; c < kReportedPoiCategories; ++c) {
            f.share[c] = (f.count[c] > 0.0 && f.total > 0.0) ? f.count[c] / f.total : 0.0;
            f.area_density[c] = f.count[c] > 0.0 ? f.count[c] / city.regions[r].area_km2 : 0.0;
        }
    }
    return out;
}

std::vector<DynamicFeatures> dynamic_features(const CityData& city, MonthWindow window) {
    std::vector<DynamicFeatures> out(city.regions.size());
    std::array<double, kIntervalsPerDay> interval_total{};
    std::vector<std::unordered_set<std::int64_t>> seen(city.regions.size());
    for (const auto& ck : city.checkins) {
        if (!window.contains(ck.month_idx)) continue;
        auto& f = out[ck.region];
        f.checkin_total[ck.interval] += 1.0;
        f.region_total += 1.0;
        interval_total[ck.interval] += 1.0;
        std::int64_t key = static_cast<std::int64_t>(ck.user) * kIntervalsPerDay + ck.interval;
        if (seen[ck.region].insert(key).second) f.visitor_count[ck.interval] += 1.0;
    }
    for (std::size_t r = 0; r < city.regions.size(); ++r) {
        auto& f = out[r];
        for (int t = 0; t < kIntervalsPerDay; ++t) {
            double ck_rt = f.checkin_total[t];
            f.checkin_share[t] = (ck_rt > 0.0 && f.region_total > 0.0) ? ck_rt / f.region_total : 0.0;
            f.checkin_area_density[t] = ck_rt > 0.0 ? ck_rt / city.regions[r].area_km2 : 0.0;
            f.region_popularity[t] =
                (ck_rt > 0.0 && interval_total[t] > 0.0) ? ck_rt / interval_total[t] : 0.0;
        }
    }
    return out;
}

RegionFeatureTable build_region_features(const CityData& city, MonthWindow window,
                                         const FeatureOptions& opts) {
    RegionFeatureTable table;
    table.schema = matrix_schema(opts);
    table.options = opts;
    table.season_of_month = city.binning.season_of_month;
    table.window = window;

    auto historical = crime_history_features(city, window);
    auto lights = streetlight_features(city, window, opts.include_light_distance);
    auto pois = poi_features(city);
    auto dynamic = dynamic_features(city, window);

    table.rows.resize(city.regions.size());
    for (std::size_t r = 0; r < city.regions.size(); ++r) {
        auto& row = table.rows[r];
        row.region_id = city.regions[r].id;
        row.historical = historical[r];
        row.demographics = city.demographics[r];
        row.streetlight = lights[r];
        row.poi = pois[r];
        row.dynamic = dynamic[r];
    }
    return table;
}

void write_region_features_csv(const std::string& path, const RegionFeatureTable& table) {
    std::vector<std::pair<std::string, Group>> cols;
    auto add = [&](std::string name, Group g) { cols.emplace_back(std::move(name), g); };
    add("crime_frequency", Group::R);
    add("crime_density_pop", Group::R);
    add("crime_density_area", Group::R);
    for (int s = 0; s < kSeasonCount; ++s)
        add("crime_season_share_" + std::string(season_name(static_cast<Season>(s))), Group::R);
    for (auto col : ingest::demographic_columns()) add(std::string(col), Group::D);
    add("streetlight_count", Group::S);
    add("streetlight_density", Group::S);
    if (table.options.include_light_distance) add("avg_min_light_distance_km", Group::S);
    for (int t = 0; t < kIntervalsPerDay; ++t) add("checkin_total_t" + std::to_string(t), Group::F);
    for (int t = 0; t < kIntervalsPerDay; ++t) add("checkin_share_t" + std::to_string(t), Group::F);
    for (int t = 0; t < kIntervalsPerDay; ++t) add("visitor_count_t" + std::to_string(t), Group::F);
    for (int t = 0; t < kIntervalsPerDay; ++t)
        add("region_popularity_t" + std::to_string(t), Group::F);
    add("poi_total", Group::P);
    for (auto cat : reported_poi_categories()) add("poi_count_" + std::string(cat), Group::P);
    for (auto cat : reported_poi_categories()) add("poi_share_" + std::string(cat), Group::P);

    CsvWriter w(path);
    std::vector<std::string> header = {"region_id"};
    for (const auto& [name, group] : cols) header.push_back(name);
    w.write_row(header);
    for (const auto& row : table.rows) {
        std::vector<std::string> fields = {row.region_id};
        auto push = [&](double v) { fields.push_back(format_double(v)); };
        push(row.historical.crime_frequency);
        push(row.historical.crime_density_pop);
        push(row.historical.crime_density_area);
        for (double v : row.historical.season_share) push(v);
        for (double v : row.demographics) push(v);
        push(row.streetlight.count);
        push(row.streetlight.density);
        if (table.options.include_light_distance) push(row.streetlight.avg_min_crime_distance_km);
        for (double v : row.dynamic.checkin_total) push(v);
        for (double v : row.dynamic.checkin_share) push(v);
        for (double v : row.dynamic.visitor_count) push(v);
        for (double v : row.dynamic.region_popularity) push(v);
        push(row.poi.total);
        for (double v : row.poi.count) push(v);
        for (double v : row.poi.share) push(v);
        w.write_row(fields);
    }

    CsvWriter ws(path + ".schema.csv");
    ws.write_row({"column", "group"});
    for (const auto& [name, group] : cols)
        ws.write_row({name, std::string(1, group_letter(group))});
}

}  // namespace crimegrid::features
