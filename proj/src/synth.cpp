#include "crimegrid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "crimegrid/csv.hpp"
#include "crimegrid/errors.hpp"
#include "crimegrid/geo.hpp"
#include "crimegrid/ingest.hpp"
#include "crimegrid/rng.hpp"
#include "crimegrid/timeutil.hpp"

namespace crimegrid::synth {

using nlohmann::json;

namespace {

constexpr double kOriginLat = 44.60;
constexpr double kOriginLon = -63.70;
constexpr double kCellDeg = 0.01;

// Sign-flip contrast over the 8 three-hour intervals: high-risk regions run
// hot in the first half of the day, low-risk regions in the second. The
// unit magnitude keeps the marginal rate per interval flat, so the planted
// signal is recoverable only through region attributes.
constexpr double kIntervalPattern[8] = {1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0};

constexpr const char* kUcrCodes[6] = {"1110", "1430", "2120", "2132", "3410", "4210"};

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

struct RegionDraw {
    std::string id;
    int row, col;
    double lat_lo, lon_lo;  // south-west corner
    double area_km2;
    double risk;       // latent in [0, 1]
    double downtown;   // exp(-distance to the downtown corner)
    long long population;
    std::array<double, ingest::kDemographicColumnCount> demo{};
    long long lights = 0;
    long long pois = 0;
};

geo::GeoPoint random_point_in(const RegionDraw& r, Rng& rng) {
    return geo::GeoPoint{r.lat_lo + rng.uniform() * kCellDeg,
                         r.lon_lo + rng.uniform() * kCellDeg};
}

}  // namespace

void validate_config(const CityConfig& config) {
    if (config.grid_size < 2) throw ConfigError("synth: grid_size must be at least 2");
    if (config.n_years < 1) throw ConfigError("synth: n_years must be at least 1");
    if (!(config.base_rate > 0.0 && config.base_rate < 1.0))
        throw ConfigError("synth: base_rate must be inside (0, 1)");
    if (!(config.noise >= 0.0) || !std::isfinite(config.noise))
        throw ConfigError("synth: noise must be a non-negative finite value");
    for (double w : {config.weights.demographic, config.weights.demographic_interaction,
                     config.weights.streetlight, config.weights.poi, config.weights.seasonal,
                     config.weights.weekend}) {
        if (!std::isfinite(w)) throw ConfigError("synth: planted weights must be finite");
    }
    if (config.users < 1) throw ConfigError("synth: need at least one user");
    if (config.poi_downtown_rate < 0.0 || config.checkin_mean < 0.0)
        throw ConfigError("synth: rates must be non-negative");
    if (config.multi_crime_rate < 0.0 || config.multi_crime_rate > 1.0)
        throw ConfigError("synth: multi_crime_rate must be in [0, 1]");
}

TruthManifest generate(const CityConfig& config, const std::string& out_dir) {
    validate_config(config);
    std::filesystem::create_directories(out_dir);
    const int g = config.grid_size;
    const int n_regions = g * g;

    std::vector<RegionDraw> regions;
    regions.reserve(n_regions);
    for (int i = 0; i < g; ++i) {
        for (int j = 0; j < g; ++j) {
            RegionDraw r;
            int idx = i * g + j;
            char buf[16];
            std::snprintf(buf, sizeof(buf), "DA%04d", idx + 1);
            r.id = buf;
            r.row = i;
            r.col = j;
            r.lat_lo = kOriginLat + i * kCellDeg;
            r.lon_lo = kOriginLon + j * kCellDeg;
            std::vector<geo::GeoPoint> ring = {
                {r.lat_lo, r.lon_lo},
                {r.lat_lo, r.lon_lo + kCellDeg},
                {r.lat_lo + kCellDeg, r.lon_lo + kCellDeg},
                {r.lat_lo + kCellDeg, r.lon_lo},
            };
            r.area_km2 = geo::polygon_area_km2(ring);
            r.downtown = std::exp(-std::sqrt(static_cast<double>(i * i + j * j)) / 2.5);
            regions.push_back(std::move(r));
        }
    }

    // latent risk and demographics: two region classes with near-unit
    // centered risk magnitude, so region totals stay flat and the planted
    // interaction is recoverable only through the region attributes
    for (int idx = 0; idx < n_regions; ++idx) {
        RegionDraw& r = regions[idx];
        Rng rng(derive_seed(config.seed, {0xde30ull, static_cast<std::uint64_t>(idx)}));
        double magnitude = 0.8 + 0.2 * rng.uniform();
        r.risk = rng.bernoulli(0.5) ? 0.5 + magnitude / 2.0 : 0.5 - magnitude / 2.0;

        auto& d = r.demo;
        auto clamp0 = [](double v) { return v < 0.0 ? 0.0 : v; };
        r.population = 400 + static_cast<long long>(1600.0 * std::pow(rng.uniform(), 1.2));
        d[0] = static_cast<double>(r.population);
        d[1] = d[0] / r.area_km2;
        double households = d[0] / (1.9 + 0.8 * rng.uniform());
        d[2] = std::floor(households);
        double share_detached = 0.2 + 0.5 * rng.uniform();
        d[3] = std::floor(d[2] * share_detached);
        d[4] = std::floor(d[2] * 0.08 * rng.uniform());
        d[5] = std::floor(d[2] * 0.10 * rng.uniform());
        d[6] = std::floor(d[2] * 0.08 * rng.uniform());
        d[7] = std::floor(d[2] * 0.25 * rng.uniform());
        d[8] = std::floor(d[2] * 0.20 * rng.uniform());
        d[9] = std::floor(d[2] * 0.02 * rng.uniform());
        d[10] = std::floor(d[2] * (0.35 + 0.4 * rng.uniform()));
        d[11] = clamp0(d[2] - d[10]);
        d[12] = d[2] > 0.0 ? d[0] / d[2] : 0.0;
        double movers = std::floor(d[0] * (0.05 + 0.25 * rng.uniform()));
        d[13] = movers;
        d[14] = clamp0(d[0] - movers);
        d[15] = std::floor(movers * (0.2 + 0.4 * rng.uniform()));
        d[16] = clamp0(movers - d[15]);
        d[17] = std::floor(d[0] * (0.02 + 0.3 * rng.uniform()));
        double employed = std::floor(d[0] * (0.40 + 0.15 * rng.uniform()));
        double car = 0.45 + 0.3 * rng.uniform();
        double transit = (1.0 - car) * (0.3 + 0.3 * rng.uniform());
        double walk = (1.0 - car - transit) * (0.4 + 0.3 * rng.uniform());
        double bicycle = (1.0 - car - transit - walk) * (0.3 + 0.3 * rng.uniform());
        d[18] = std::floor(employed * car);
        d[19] = std::floor(employed * transit);
        d[20] = std::floor(employed * walk);
        d[21] = std::floor(employed * bicycle);
        d[22] = clamp0(employed - d[18] - d[19] - d[20] - d[21]);
        double leave_left = employed;
        for (int k = 0; k < 4; ++k) {
            double part = std::floor(leave_left * (0.15 + 0.2 * rng.uniform()));
            d[23 + k] = part;
            leave_left -= part;
        }
        d[27] = clamp0(leave_left);
        // the planted risk index shows up mainly through the low-income block
        d[28] = std::clamp(4.0 + 42.0 * r.risk + 3.0 * rng.normal(), 0.0, 100.0);
        d[29] = std::clamp(d[28] * (0.9 + 0.3 * rng.uniform()), 0.0, 100.0);
        d[30] = std::clamp(d[28] * (0.7 + 0.3 * rng.uniform()), 0.0, 100.0);
        d[31] = std::clamp(30.0 + 25.0 * (1.0 - r.risk) + 2.0 * rng.normal(), 0.0, 100.0);
    }

    // streetlights: Poisson intensity tied inversely to the risk index, so
    // light density carries the planted signal with sampling noise
    std::vector<geo::GeoPoint> light_points;
    for (int idx = 0; idx < n_regions; ++idx) {
        RegionDraw& r = regions[idx];
        Rng rng(derive_seed(config.seed, {0x11e47ull, static_cast<std::uint64_t>(idx)}));
        r.lights = rng.poisson(25.0 + 155.0 * (1.0 - r.risk));
        for (long long k = 0; k < r.lights; ++k) light_points.push_back(random_point_in(r, rng));
    }

    double light_mean = 0.0, light_sd = 0.0;
    {
        std::vector<double> dens;
        dens.reserve(regions.size());
        for (const auto& r : regions) dens.push_back(static_cast<double>(r.lights) / r.area_km2);
        for (double v : dens) light_mean += v;
        light_mean /= dens.size();
        for (double v : dens) light_sd += (v - light_mean) * (v - light_mean);
        light_sd = std::sqrt(light_sd / dens.size());
        if (light_sd <= 0.0) light_sd = 1.0;
    }

    // POIs cluster toward the downtown corner
    struct Venue {
        std::string id;
        geo::GeoPoint location;
        int category;
        int region;
        double popularity;
    };
    std::vector<Venue> venues;
    const double cat_weights[ingest::kPoiCategoryCount] = {0.20, 0.06, 0.05, 0.08, 0.07,
                                                           0.14, 0.12, 0.18, 0.07, 0.03};
    for (int idx = 0; idx < n_regions; ++idx) {
        RegionDraw& r = regions[idx];
        Rng rng(derive_seed(config.seed, {0x90111ull, static_cast<std::uint64_t>(idx)}));
        r.pois = rng.poisson(0.5 + config.poi_downtown_rate * r.downtown);
        for (long long k = 0; k < r.pois; ++k) {
            Venue v;
            char buf[16];
            std::snprintf(buf, sizeof(buf), "V%05zu", venues.size() + 1);
            v.id = buf;
            v.location = random_point_in(r, rng);
            double u = rng.uniform();
            double acc = 0.0;
            v.category = ingest::kPoiCategoryCount - 1;
            for (int c = 0; c < ingest::kPoiCategoryCount; ++c) {
                acc += cat_weights[c];
                if (u < acc) { v.category = c; break; }
            }
            v.region = idx;
            v.popularity = config.checkin_mean * (0.4 + 1.2 * r.downtown + 0.6 * rng.uniform());
            venues.push_back(std::move(v));
        }
    }

    double poi_mean = 0.0, poi_sd = 0.0;
    {
        std::vector<double> dens(n_regions, 0.0);
        for (const auto& v : venues) dens[v.region] += 1.0;
        for (int idx = 0; idx < n_regions; ++idx) dens[idx] /= regions[idx].area_km2;
        for (double v : dens) poi_mean += v;
        poi_mean /= dens.size();
        for (double v : dens) poi_sd += (v - poi_mean) * (v - poi_mean);
        poi_sd = std::sqrt(poi_sd / dens.size());
        if (poi_sd <= 0.0) poi_sd = 1.0;
    }

    // check-ins: evening-heavy interval profile, users drawn uniformly
    const double interval_weights[kIntervalsPerDay] = {2, 1, 1, 2, 4, 6, 8, 8};
    double interval_total = 0.0;
    for (double w : interval_weights) interval_total += w;
    std::vector<ingest::CheckinRecord> checkins;
    const long long first_day = days_from_civil(config.start_year, 1, 1);
    const long long total_days =
        days_from_civil(config.start_year + config.n_years, 1, 1) - first_day;
    for (std::size_t vi = 0; vi < venues.size(); ++vi) {
        Rng rng(derive_seed(config.seed, {0xc4ec1ull, static_cast<std::uint64_t>(vi)}));
        long long n = rng.poisson(venues[vi].popularity);
        for (long long k = 0; k < n; ++k) {
            ingest::CheckinRecord rec;
            char buf[16];
            std::snprintf(buf, sizeof(buf), "U%04d",
                          static_cast<int>(rng.uniform_index(config.users)) + 1);
            rec.user_id = buf;
            rec.venue_id = venues[vi].id;
            long long day = first_day + static_cast<long long>(rng.uniform_index(total_days));
            double u = rng.uniform() * interval_total;
            int interval = 0;
            double acc = 0.0;
            for (int t = 0; t < kIntervalsPerDay; ++t) {
                acc += interval_weights[t];
                if (u < acc) { interval = t; break; }
            }
            DateTime dt;
            civil_from_days(day, dt.year, dt.month, dt.day);
            dt.hour = interval * 3 + rng.uniform_int(0, 2);
            dt.minute = rng.uniform_int(0, 59);
            dt.second = 0;
            rec.timestamp = dt;
            checkins.push_back(std::move(rec));
        }
    }

    // crimes: Bernoulli per (region, year, month, weekday, interval) cell with
    // a logistic intensity over the planted effects
    const double intercept = logit(config.base_rate);
    const auto& w = config.weights;
    long long crime_count = 0;
    {
        CsvWriter crimes_csv(out_dir + "/crimes.csv");
        crimes_csv.write_row({"lat", "lon", "timestamp", "ucr_code"});
        for (int idx = 0; idx < n_regions; ++idx) {
            RegionDraw& r = regions[idx];
            Rng rng(derive_seed(config.seed, {0xc3173ull, static_cast<std::uint64_t>(idx)}));
            double light_std = (static_cast<double>(r.lights) / r.area_km2 - light_mean) / light_sd;
            double poi_std = (static_cast<double>(r.pois) / r.area_km2 - poi_mean) / poi_sd;
            double risk_c = 2.0 * r.risk - 1.0;
            for (int y = config.start_year; y < config.start_year + config.n_years; ++y) {
                for (int m = 1; m <= 12; ++m) {
                    // calendar days of (y, m) grouped by weekday, for record dates
                    std::array<std::vector<int>, 7> days_by_weekday;
                    for (int day = 1; day <= days_in_month(y, m); ++day)
                        days_by_weekday[weekday_monday0(y, m, day)].push_back(day);
                    for (int wd = 0; wd < 7; ++wd) {
                        for (int t = 0; t < kIntervalsPerDay; ++t) {
                            double z = intercept + w.demographic * risk_c +
                                       w.demographic_interaction * kIntervalPattern[t] * risk_c +
                                       w.streetlight * light_std + w.poi * poi_std +
                                       w.seasonal * std::cos(2.0 * M_PI * (m - 1) / 12.0) +
                                       w.weekend * (wd >= 5 ? 1.0 : -1.0);
                            if (config.noise > 0.0) z += config.noise * rng.normal();
                            if (!rng.bernoulli(sigmoid(z))) continue;
                            int n_records = 1 + (rng.bernoulli(config.multi_crime_rate) ? 1 : 0);
                            for (int k = 0; k < n_records; ++k) {
                                const auto& days = days_by_weekday[wd];
                                int day = days[rng.uniform_index(days.size())];
                                DateTime dt{y, m, day, t * 3 + rng.uniform_int(0, 2),
                                            rng.uniform_int(0, 59), rng.uniform_int(0, 59)};
                                geo::GeoPoint p = random_point_in(r, rng);
                                crimes_csv.write_row(
                                    {format_double(p.lat), format_double(p.lon),
                                     format_iso8601(dt),
                                     kUcrCodes[rng.uniform_index(6)]});
                                ++crime_count;
                            }
                        }
                    }
                }
            }
        }
    }

    // regions.geojson
    {
        json features = json::array();
        for (const auto& r : regions) {
            json ring = json::array();
            auto push = [&](double lat, double lon) { ring.push_back(json::array({lon, lat})); };
            push(r.lat_lo, r.lon_lo);
            push(r.lat_lo, r.lon_lo + kCellDeg);
            push(r.lat_lo + kCellDeg, r.lon_lo + kCellDeg);
            push(r.lat_lo + kCellDeg, r.lon_lo);
            push(r.lat_lo, r.lon_lo);  // closed per GeoJSON
            features.push_back(json{
                {"type", "Feature"},
                {"properties",
                 {{"id", r.id}, {"population", r.population}, {"area_km2", r.area_km2}}},
                {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({ring})}}}});
        }
        json doc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
        std::ofstream out(out_dir + "/regions.geojson", std::ios::binary);
        if (!out) throw DataError("cannot write regions.geojson");
        out << doc.dump(2) << '\n';
    }

    {
        std::vector<ingest::StreetlightPole> poles;
        poles.reserve(light_points.size());
        for (const auto& p : light_points) poles.push_back(ingest::StreetlightPole{p});
        ingest::write_streetlights_csv(out_dir + "/streetlights.csv", poles);
    }
    {
        std::vector<ingest::PoiVenue> out_venues;
        out_venues.reserve(venues.size());
        for (const auto& v : venues)
            out_venues.push_back(ingest::PoiVenue{v.id, v.location, v.category});
        ingest::write_pois_csv(out_dir + "/pois.csv", out_venues);
    }
    ingest::write_checkins_csv(out_dir + "/checkins.csv", checkins);
    {
        std::vector<ingest::DemographicProfile> profiles;
        for (const auto& r : regions) {
            ingest::DemographicProfile p;
            p.region_id = r.id;
            p.values = r.demo;
            profiles.push_back(std::move(p));
        }
        ingest::write_demographics_csv(out_dir + "/demographics.csv", profiles);
    }

    TruthManifest manifest;
    manifest.seed = config.seed;
    manifest.crimes = crime_count;
    manifest.streetlights = static_cast<long long>(light_points.size());
    manifest.pois = static_cast<long long>(venues.size());
    manifest.checkins = static_cast<long long>(checkins.size());
    manifest.regions = n_regions;
    manifest.light_density_mean = light_mean;
    manifest.light_density_sd = light_sd;
    manifest.streetlight_effect_sign =
        w.streetlight > 0.0 ? 1 : (w.streetlight < 0.0 ? -1 : 0);
    manifest.demographic_effect_sign =
        (w.demographic > 0.0 || w.demographic_interaction > 0.0) ? 1 : 0;

    {
        json doc;
        doc["format"] = "crimegrid_truth_v1";
        doc["seed"] = config.seed;
        doc["grid_size"] = config.grid_size;
        doc["start_year"] = config.start_year;
        doc["n_years"] = config.n_years;
        doc["base_rate"] = config.base_rate;
        doc["noise"] = config.noise;
        doc["weights"] = {{"demographic", w.demographic},
                          {"demographic_interaction", w.demographic_interaction},
                          {"streetlight", w.streetlight},
                          {"poi", w.poi},
                          {"seasonal", w.seasonal},
                          {"weekend", w.weekend}};
        doc["counts"] = {{"regions", manifest.regions},
                         {"crimes", manifest.crimes},
                         {"streetlights", manifest.streetlights},
                         {"pois", manifest.pois},
                         {"checkins", manifest.checkins}};
        doc["light_density_mean"] = light_mean;
        doc["light_density_sd"] = light_sd;
        doc["expected_effects"] = {
            {"streetlight_density", manifest.streetlight_effect_sign},
            {"low_income_prevalence", manifest.demographic_effect_sign}};
        std::ofstream out(out_dir + "/truth_manifest.json", std::ios::binary);
        if (!out) throw DataError("cannot write truth_manifest.json");
        out << doc.dump(2) << '\n';
    }
    return manifest;
}

}  // namespace crimegrid::synth
