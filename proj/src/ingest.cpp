#include "crimegrid/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "crimegrid/csv.hpp"
#include "crimegrid/errors.hpp"

namespace crimegrid::ingest {

using nlohmann::json;

const std::array<std::string_view, kPoiCategoryCount>& poi_categories() {
    static const std::array<std::string_view, kPoiCategoryCount> cats = {
        "food",
        "arts_entertainment",
        "college_university",
        "nightlife",
        "outdoors_recreation",
        "professional_other",
        "residence",
        "shop_service",
        "travel_transport",
        "event",
    };
    return cats;
}

int poi_category_index(std::string_view name) {
    const auto& cats = poi_categories();
    for (int i = 0; i < kPoiCategoryCount; ++i)
        if (cats[i] == name) return i;
    return -1;
}

const std::array<std::string_view, kDemographicColumnCount>& demographic_columns() {
    static const std::array<std::string_view, kDemographicColumnCount> cols = {
        "population",
        "population_density",
        "dwelling_total",
        "dwelling_single_detached",
        "dwelling_semi_detached",
        "dwelling_row_house",
        "dwelling_apartment_duplex",
        "dwelling_apartment_low_rise",
        "dwelling_apartment_high_rise",
        "dwelling_movable",
        "dwelling_owned",
        "dwelling_rented",
        "dwelling_avg_household_size",
        "mobility_movers",
        "mobility_non_movers",
        "mobility_migrants",
        "mobility_non_migrants",
        "aboriginals_visible_minorities",
        "commute_car",
        "commute_public_transit",
        "commute_walk",
        "commute_bicycle",
        "commute_other",
        "leave_for_work_5am",
        "leave_for_work_6am",
        "leave_for_work_7am",
        "leave_for_work_8am",
        "leave_for_work_9am_to_noon",
        "low_income_prevalence",
        "low_income_under_18",
        "low_income_18_to_64",
        "age_and_sex",
    };
    return cols;
}

int demographic_column_index(std::string_view name) {
    const auto& cols = demographic_columns();
    for (int i = 0; i < kDemographicColumnCount; ++i)
        if (cols[i] == name) return i;
    return -1;
}

namespace {

void require_header(const CsvTable& table, const std::vector<std::string>& expected,
                    const std::string& path) {
    if (table.header != expected) {
        std::string want;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) want += ",";
            want += expected[i];
        }
        throw DataError(path + ": expected header '" + want + "'");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

std::vector<geo::Region> parse_regions(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw DataError(path + ": invalid GeoJSON: " + e.what());
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
        !doc.contains("features") || !doc["features"].is_array())
        throw DataError(path + ": expected a GeoJSON FeatureCollection");

    std::vector<geo::Region> regions;
    std::set<std::string> seen_ids;
    std::size_t index = 0;
    for (const auto& feature : doc["features"]) {
        std::string where = path + ": feature #" + std::to_string(index++);
        if (!feature.is_object() || feature.value("type", "") != "Feature")
            throw DataError(where + ": not a Feature");
        const auto& props = feature.value("properties", json::object());
        if (!props.contains("id") || !props["id"].is_string())
            throw DataError(where + ": missing string property 'id'");
        geo::Region region;
        region.id = props["id"].get<std::string>();
        where += " (id " + region.id + ")";
        if (!seen_ids.insert(region.id).second)
            throw DataError(where + ": duplicate region id");
        if (!props.contains("population") || !props["population"].is_number())
            throw DataError(where + ": missing numeric property 'population'");
        region.population = props["population"].get<long long>();

        const auto& geom = feature.value("geometry", json::object());
        if (geom.value("type", "") != "Polygon" || !geom.contains("coordinates") ||
            !geom["coordinates"].is_array() || geom["coordinates"].empty())
            throw DataError(where + ": geometry must be a Polygon");
        const auto& ring = geom["coordinates"][0];
        if (!ring.is_array() || ring.size() < 3)
            throw DataError(where + ": outer ring needs at least 3 positions");
        for (const auto& pos : ring) {
            if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number())
                throw DataError(where + ": malformed ring position");
            double lon = pos[0].get<double>();
            double lat = pos[1].get<double>();
            if (!geo::point_in_bounds(lat, lon))
                throw DataError(where + ": ring position out of range");
            region.ring.push_back(geo::GeoPoint{lat, lon});
        }
        // GeoJSON rings repeat the first vertex; the Region type stores it open.
        if (region.ring.size() >= 2 && region.ring.front() == region.ring.back())
            region.ring.pop_back();

        if (props.contains("area_km2")) {
            if (!props["area_km2"].is_number())
                throw DataError(where + ": property 'area_km2' must be numeric");
            region.area_km2 = props["area_km2"].get<double>();
        } else {
            try {
                region.area_km2 = geo::polygon_area_km2(region.ring);
            } catch (const DataError& e) {
                throw DataError(where + ": " + e.what());
            }
        }
        try {
            geo::validate_region(region);
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
        regions.push_back(std::move(region));
    }
    return regions;
}

Parsed<CrimeRecord> parse_crimes(const std::string& path, const TimeBinning& binning,
                                 int tz_offset_minutes) {
    CsvTable table = read_csv_file(path);
    require_header(table, {"lat", "lon", "timestamp", "ucr_code"}, path);
    Parsed<CrimeRecord> out;
    for (const auto& row : table.rows) {
        if (row.size() != 4) { ++out.stats.rejected; continue; }
        auto lat = parse_double_strict(row[0]);
        auto lon = parse_double_strict(row[1]);
        auto ts = parse_iso8601(row[2]);
        if (!lat || !lon || !ts || !geo::point_in_bounds(*lat, *lon)) {
            ++out.stats.rejected;
            continue;
        }
        DateTime local = tz_offset_minutes ? add_minutes(*ts, tz_offset_minutes) : *ts;
        BinnedTime bt = bin_timestamp(local, binning);
        CrimeRecord rec;
        rec.location = geo::GeoPoint{*lat, *lon};
        rec.year = bt.year;
        rec.month = bt.month;
        rec.weekday = bt.weekday;
        rec.interval = bt.interval;
        rec.ucr_code = row[3];
        out.records.push_back(std::move(rec));
        ++out.stats.accepted;
    }
    return out;
}

Parsed<StreetlightPole> parse_streetlights(const std::string& path) {
    CsvTable table = read_csv_file(path);
    require_header(table, {"lat", "lon"}, path);
    Parsed<StreetlightPole> out;
    for (const auto& row : table.rows) {
        if (row.size() != 2) { ++out.stats.rejected; continue; }
        auto lat = parse_double_strict(row[0]);
        auto lon = parse_double_strict(row[1]);
        if (!lat || !lon || !geo::point_in_bounds(*lat, *lon)) {
            ++out.stats.rejected;
            continue;
        }
        out.records.push_back(StreetlightPole{geo::GeoPoint{*lat, *lon}});
        ++out.stats.accepted;
    }
    return out;
}

Parsed<PoiVenue> parse_pois(const std::string& path) {
    CsvTable table = read_csv_file(path);
    require_header(table, {"id", "lat", "lon", "category"}, path);
    Parsed<PoiVenue> out;
    std::unordered_set<std::string> seen;
    for (const auto& row : table.rows) {
        if (row.size() != 4) { ++out.stats.rejected; continue; }
        auto lat = parse_double_strict(row[1]);
        auto lon = parse_double_strict(row[2]);
        int cat = poi_category_index(row[3]);
        if (row[0].empty() || !lat || !lon || !geo::point_in_bounds(*lat, *lon) || cat < 0 ||
            !seen.insert(row[0]).second) {
            ++out.stats.rejected;
            continue;
        }
        out.records.push_back(PoiVenue{row[0], geo::GeoPoint{*lat, *lon}, cat});
        ++out.stats.accepted;
    }
    return out;
}

Parsed<CheckinRecord> parse_checkins(const std::string& path, std::span<const PoiVenue> venues) {
    CsvTable table = read_csv_file(path);
    require_header(table, {"user_id", "venue_id", "timestamp"}, path);
    std::unordered_set<std::string_view> known;
    known.reserve(venues.size());
    for (const auto& v : venues) known.insert(v.id);

    Parsed<CheckinRecord> out;
    for (const auto& row : table.rows) {
        if (row.size() != 3) { ++out.stats.rejected; continue; }
        auto ts = parse_iso8601(row[2]);
        if (row[0].empty() || row[1].empty() || !ts) {
            ++out.stats.rejected;
            continue;
        }
        if (!known.contains(row[1])) {
            ++out.stats.rejected;
            ++out.stats.rejected_orphan_venue;
            continue;
        }
        CheckinRecord rec;
        rec.user_id = row[0];
        rec.venue_id = row[1];
        rec.timestamp = *ts;
        rec.timestamp.second = 0;  // minute precision
        out.records.push_back(std::move(rec));
        ++out.stats.accepted;
    }
    return out;
}

Parsed<DemographicProfile> parse_demographics(const std::string& path) {
    CsvTable table = read_csv_file(path);
    std::vector<std::string> expected = {"region_id"};
    for (auto col : demographic_columns()) expected.emplace_back(col);
    require_header(table, expected, path);

    // First pass: parse cells, remember gaps; second pass: impute medians.
    struct Row {
        std::string region_id;
        std::array<double, kDemographicColumnCount> values{};
        std::array<bool, kDemographicColumnCount> missing{};
    };
    Parsed<DemographicProfile> out;
    std::vector<Row> rows;
    for (const auto& fields : table.rows) {
        if (fields.size() != expected.size() || fields[0].empty()) {
            ++out.stats.rejected;
            continue;
        }
        Row row;
        row.region_id = fields[0];
        bool bad = false;
        for (int c = 0; c < kDemographicColumnCount; ++c) {
            const std::string& cell = fields[c + 1];
            if (cell.empty()) {
                row.missing[c] = true;
                continue;
            }
            auto v = parse_double_strict(cell);
            if (!v || *v < 0.0) { bad = true; break; }
            row.values[c] = *v;
        }
        if (bad) { ++out.stats.rejected; continue; }
        rows.push_back(std::move(row));
    }

    std::array<double, kDemographicColumnCount> medians{};
    for (int c = 0; c < kDemographicColumnCount; ++c) {
        std::vector<double> present;
        for (const auto& row : rows)
            if (!row.missing[c]) present.push_back(row.values[c]);
        if (present.empty()) {
            medians[c] = 0.0;
            continue;
        }
        std::sort(present.begin(), present.end());
        std::size_t n = present.size();
        medians[c] = (n % 2 == 1) ? present[n / 2]
                                  : (present[n / 2 - 1] + present[n / 2]) / 2.0;
    }

    for (const auto& row : rows) {
        DemographicProfile profile;
        profile.region_id = row.region_id;
        for (int c = 0; c < kDemographicColumnCount; ++c) {
            if (row.missing[c]) {
                profile.values[c] = medians[c];
                ++out.stats.imputed_cells;
            } else {
                profile.values[c] = row.values[c];
            }
        }
        out.records.push_back(std::move(profile));
        ++out.stats.accepted;
    }
    return out;
}

void write_crime_records_csv(const std::string& path, std::span<const CrimeRecord> records) {
    CsvWriter w(path);
    w.write_row({"lat", "lon", "year", "month", "weekday", "interval", "ucr_code"});
    for (const auto& r : records) {
        w.write_row({format_double(r.location.lat), format_double(r.location.lon),
                     std::to_string(r.year), std::to_string(r.month), std::to_string(r.weekday),
                     std::to_string(r.interval), r.ucr_code});
    }
}

Parsed<CrimeRecord> read_crime_records_csv(const std::string& path) {
    CsvTable table = read_csv_file(path);
    require_header(table, {"lat", "lon", "year", "month", "weekday", "interval", "ucr_code"},
                   path);
    Parsed<CrimeRecord> out;
    for (const auto& row : table.rows) {
        if (row.size() != 7) { ++out.stats.rejected; continue; }
        auto lat = parse_double_strict(row[0]);
        auto lon = parse_double_strict(row[1]);
        auto year = parse_int_strict(row[2]);
        auto month = parse_int_strict(row[3]);
        auto weekday = parse_int_strict(row[4]);
        auto interval = parse_int_strict(row[5]);
        if (!lat || !lon || !year || !month || !weekday || !interval ||
            !geo::point_in_bounds(*lat, *lon) || *month < 1 || *month > 12 || *weekday < 0 ||
            *weekday > 6 || *interval < 0 || *interval >= kIntervalsPerDay) {
            ++out.stats.rejected;
            continue;
        }
        CrimeRecord rec;
        rec.location = geo::GeoPoint{*lat, *lon};
        rec.year = static_cast<int>(*year);
        rec.month = static_cast<int>(*month);
        rec.weekday = static_cast<int>(*weekday);
        rec.interval = static_cast<int>(*interval);
        rec.ucr_code = row[6];
        out.records.push_back(std::move(rec));
        ++out.stats.accepted;
    }
    return out;
}

void write_streetlights_csv(const std::string& path, std::span<const StreetlightPole> records) {
    CsvWriter w(path);
    w.write_row({"lat", "lon"});
    for (const auto& r : records)
        w.write_row({format_double(r.location.lat), format_double(r.location.lon)});
}

void write_pois_csv(const std::string& path, std::span<const PoiVenue> records) {
    CsvWriter w(path);
    w.write_row({"id", "lat", "lon", "category"});
    for (const auto& r : records)
        w.write_row({r.id, format_double(r.location.lat), format_double(r.location.lon),
                     std::string(poi_categories()[r.category])});
}

void write_checkins_csv(const std::string& path, std::span<const CheckinRecord> records) {
    CsvWriter w(path);
    w.write_row({"user_id", "venue_id", "timestamp"});
    for (const auto& r : records)
        w.write_row({r.user_id, r.venue_id, format_iso8601(r.timestamp)});
}

void write_demographics_csv(const std::string& path, std::span<const DemographicProfile> records) {
    CsvWriter w(path);
    std::vector<std::string> header = {"region_id"};
    for (auto col : demographic_columns()) header.emplace_back(col);
    w.write_row(header);
    for (const auto& r : records) {
        std::vector<std::string> row = {r.region_id};
        for (double v : r.values) row.push_back(format_double(v));
        w.write_row(row);
    }
}

}  // namespace crimegrid::ingest
