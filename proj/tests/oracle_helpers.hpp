#pragma once

// Test-only oracles: naive recounts and small-fixture builders, kept
// independent of the library's feature-computation path.

#include <array>
#include <map>
#include <set>
#include <vector>

#include "crimegrid/features.hpp"
#include "crimegrid/geo.hpp"
#include "crimegrid/ingest.hpp"
#include "crimegrid/rng.hpp"
#include "crimegrid/timeutil.hpp"

namespace oracle {

using crimegrid::DateTime;
using crimegrid::MonthWindow;
using crimegrid::Rng;
using crimegrid::Season;
using crimegrid::TimeBinning;

struct Fixture {
    std::vector<crimegrid::geo::Region> regions;           // squares, id-sorted
    std::vector<crimegrid::ingest::CrimeRecord> crimes;    // placed inside known regions
    std::vector<int> crime_region;                         // intended region per crime
    std::vector<crimegrid::ingest::StreetlightPole> lights;
    std::vector<int> light_region;
    std::vector<crimegrid::ingest::PoiVenue> pois;
    std::vector<int> poi_region;
    std::vector<crimegrid::ingest::CheckinRecord> checkins;
    std::vector<int> checkin_region;   // via the venue
    std::vector<int> checkin_interval;
    std::vector<int> checkin_month_idx;
    std::vector<crimegrid::ingest::DemographicProfile> demographics;
    TimeBinning binning = TimeBinning::default_binning();
};

inline crimegrid::geo::GeoPoint interior_point(double lat0, double lon0, double size, Rng& rng) {
    return {lat0 + size * (0.1 + 0.8 * rng.uniform()), lon0 + size * (0.1 + 0.8 * rng.uniform())};
}

// Random small city: a side x side grid of 0.01-degree squares with random
// populations (possibly zero) and random event placements.
inline Fixture random_fixture(std::uint64_t seed, int side = 3, int n_crimes = 120,
                              int n_lights = 60, int n_pois = 40, int n_checkins = 150) {
    Rng rng(seed);
    Fixture fx;
    const double size = 0.01;
    const double lat0 = 44.0, lon0 = -64.0;
    for (int i = 0; i < side; ++i) {
        for (int j = 0; j < side; ++j) {
            crimegrid::geo::Region r;
            char buf[16];
            std::snprintf(buf, sizeof(buf), "R%03d", i * side + j + 1);
            r.id = buf;
            double la = lat0 + i * size, lo = lon0 + j * size;
            r.ring = {{la, lo}, {la, lo + size}, {la + size, lo + size}, {la + size, lo}};
            r.area_km2 = crimegrid::geo::polygon_area_km2(r.ring);
            r.population = rng.bernoulli(0.15) ? 0 : rng.uniform_int(50, 2000);
            fx.regions.push_back(std::move(r));
        }
    }
    const int n_regions = side * side;
    auto region_corner = [&](int idx, double& la, double& lo) {
        la = lat0 + (idx / side) * size;
        lo = lon0 + (idx % side) * size;
    };

    for (int k = 0; k < n_crimes; ++k) {
        int region = static_cast<int>(rng.uniform_index(n_regions));
        double la, lo;
        region_corner(region, la, lo);
        crimegrid::ingest::CrimeRecord c;
        c.location = interior_point(la, lo, size, rng);
        c.year = 2012 + rng.uniform_int(0, 2);
        c.month = rng.uniform_int(1, 12);
        c.weekday = rng.uniform_int(0, 6);
        c.interval = rng.uniform_int(0, 7);
        c.ucr_code = "1110";
        fx.crimes.push_back(c);
        fx.crime_region.push_back(region);
    }
    for (int k = 0; k < n_lights; ++k) {
        int region = static_cast<int>(rng.uniform_index(n_regions));
        double la, lo;
        region_corner(region, la, lo);
        fx.lights.push_back({interior_point(la, lo, size, rng)});
        fx.light_region.push_back(region);
    }
    for (int k = 0; k < n_pois; ++k) {
        int region = static_cast<int>(rng.uniform_index(n_regions));
        double la, lo;
        region_corner(region, la, lo);
        crimegrid::ingest::PoiVenue v;
        v.id = "V" + std::to_string(k + 1);
        v.location = interior_point(la, lo, size, rng);
        v.category = rng.uniform_int(0, 9);
        fx.pois.push_back(v);
        fx.poi_region.push_back(region);
    }
    for (int k = 0; k < n_checkins; ++k) {
        int poi = fx.pois.empty() ? -1 : static_cast<int>(rng.uniform_index(fx.pois.size()));
        if (poi < 0) break;
        crimegrid::ingest::CheckinRecord c;
        c.user_id = "U" + std::to_string(rng.uniform_int(1, 25));
        c.venue_id = fx.pois[poi].id;
        c.timestamp = DateTime{2012 + rng.uniform_int(0, 2), rng.uniform_int(1, 12),
                               rng.uniform_int(1, 28), rng.uniform_int(0, 23),
                               rng.uniform_int(0, 59), 0};
        fx.checkins.push_back(c);
        fx.checkin_region.push_back(fx.poi_region[poi]);
        fx.checkin_interval.push_back(c.timestamp.hour / 3);
        fx.checkin_month_idx.push_back(crimegrid::month_index(c.timestamp.year, c.timestamp.month));
    }
    for (const auto& r : fx.regions) {
        crimegrid::ingest::DemographicProfile p;
        p.region_id = r.id;
        for (int c = 0; c < crimegrid::ingest::kDemographicColumnCount; ++c)
            p.values[c] = std::floor(rng.uniform(0, 500));
        fx.demographics.push_back(std::move(p));
    }
    return fx;
}

// Naive recount of every Eq. 1-8 quantity, straight from the fixture's
// intended assignments.
struct NaiveRegion {
    double cr = 0;
    double d_pop = 0, d_area = 0;
    std::array<double, 4> season_share{};
    double st = 0, d_st = 0;
    double n_poi = 0;
    std::array<double, 9> n_c{}, d_c{}, d1_c{};
    std::array<double, 8> ck{}, d_ck{}, d7_ck{}, visitors{}, r_rp{};
    double ck_total = 0;
};

inline std::vector<NaiveRegion> naive_recount(const Fixture& fx, MonthWindow window) {
    const std::size_t n = fx.regions.size();
    std::vector<NaiveRegion> out(n);
    std::vector<std::array<long long, 4>> season_counts(n, std::array<long long, 4>{});
    for (std::size_t k = 0; k < fx.crimes.size(); ++k) {
        const auto& c = fx.crimes[k];
        if (!window.contains(crimegrid::month_index(c.year, c.month))) continue;
        int r = fx.crime_region[k];
        out[r].cr += 1;
        ++season_counts[r][static_cast<int>(fx.binning.season(c.month))];
    }
    for (std::size_t r = 0; r < n; ++r) {
        if (out[r].cr > 0) {
            if (fx.regions[r].population > 0)
                out[r].d_pop = out[r].cr / static_cast<double>(fx.regions[r].population);
            out[r].d_area = out[r].cr / fx.regions[r].area_km2;
            for (int s = 0; s < 4; ++s)
                out[r].season_share[s] = static_cast<double>(season_counts[r][s]) / out[r].cr;
        }
    }
    for (int r : fx.light_region) out[r].st += 1;
    for (std::size_t r = 0; r < n; ++r)
        if (out[r].st > 0) out[r].d_st = out[r].st / fx.regions[r].area_km2;

    for (std::size_t k = 0; k < fx.pois.size(); ++k) {
        int r = fx.poi_region[k];
        out[r].n_poi += 1;
        int cat = fx.pois[k].category == 9 ? 5 : fx.pois[k].category;
        out[r].n_c[cat] += 1;
    }
    for (std::size_t r = 0; r < n; ++r) {
        for (int c = 0; c < 9; ++c) {
            if (out[r].n_c[c] > 0) {
                out[r].d_c[c] = out[r].n_c[c] / out[r].n_poi;
                out[r].d1_c[c] = out[r].n_c[c] / fx.regions[r].area_km2;
            }
        }
    }

    std::array<double, 8> ck_t{};
    std::vector<std::set<std::pair<std::string, int>>> visitors(n);
    for (std::size_t k = 0; k < fx.checkins.size(); ++k) {
        if (!window.contains(fx.checkin_month_idx[k])) continue;
        int r = fx.checkin_region[k];
        int t = fx.checkin_interval[k];
        out[r].ck[t] += 1;
        out[r].ck_total += 1;
        ck_t[t] += 1;
        visitors[r].insert({fx.checkins[k].user_id, t});
    }
    for (std::size_t r = 0; r < n; ++r) {
        for (const auto& [user, t] : visitors[r]) out[r].visitors[t] += 1;
        for (int t = 0; t < 8; ++t) {
            if (out[r].ck[t] > 0) {
                out[r].d_ck[t] = out[r].ck[t] / out[r].ck_total;
                out[r].d7_ck[t] = out[r].ck[t] / fx.regions[r].area_km2;
                out[r].r_rp[t] = out[r].ck[t] / ck_t[t];
            }
        }
    }
    return out;
}

inline crimegrid::features::CityData city_from_fixture(const Fixture& fx) {
    return crimegrid::features::assemble_city(fx.regions, fx.crimes, fx.lights, fx.pois,
                                              fx.checkins, fx.demographics, fx.binning);
}

// trapezoidal ROC integration, the independent AUC route
inline double trapezoid_auc(std::vector<std::uint8_t> labels, std::vector<double> scores) {
    std::vector<std::size_t> order(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    double pos = 0, neg = 0;
    for (auto v : labels) (v ? pos : neg) += 1;
    double area = 0.0;
    double tp = 0, fp = 0, prev_tp = 0, prev_fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        for (std::size_t k = i; k < j; ++k) (labels[order[k]] ? tp : fp) += 1;
        area += (fp - prev_fp) * (tp + prev_tp) / 2.0;
        prev_tp = tp;
        prev_fp = fp;
        i = j;
    }
    return area / (pos * neg);
}

}  // namespace oracle
