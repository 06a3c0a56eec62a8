#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "crimegrid/errors.hpp"
#include "crimegrid/geo.hpp"
#include "crimegrid/rng.hpp"

using namespace crimegrid;
using geo::GeoPoint;
using geo::Region;

namespace {

Region square(std::string id, double lat0, double lon0, double size, long long pop = 100) {
    Region r;
    r.id = std::move(id);
    r.ring = {{lat0, lon0}, {lat0, lon0 + size}, {lat0 + size, lon0 + size}, {lat0 + size, lon0}};
    r.area_km2 = geo::polygon_area_km2(r.ring);
    r.population = pop;
    return r;
}

// independent O(n*m) oracle
double brute_avg_min(const std::vector<GeoPoint>& sources, const std::vector<GeoPoint>& targets) {
    double sum = 0.0;
    for (const auto& s : sources) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& t : targets) best = std::min(best, geo::haversine_km(s, t));
        sum += best;
    }
    return sum / static_cast<double>(sources.size());
}

}  // namespace

TEST_CASE("haversine on identical points is zero") {
    CHECK(geo::haversine_km({44.65, -63.57}, {44.65, -63.57}) == 0.0);
}

TEST_CASE("haversine antipodal distance is pi times the radius") {
    CHECK(geo::haversine_km({0, 0}, {0, 180}) == doctest::Approx(20015.114442035923).epsilon(1e-9));
}

TEST_CASE("haversine matches an independent calculator on a Halifax pair") {
    // value pinned from an independent haversine computation with R = 6371.0088
    double d = geo::haversine_km({44.6488, -63.5752}, {44.8808, -63.5086});
    CHECK(d == doctest::Approx(26.327645700657378).epsilon(1e-12));
}

TEST_CASE("haversine ignores longitude at the poles") {
    CHECK(geo::haversine_km({90, 0}, {90, 180}) < 1e-9);
}

TEST_CASE("haversine symmetry and triangle inequality on random triples") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        GeoPoint a{rng.uniform(-89, 89), rng.uniform(-180, 180)};
        GeoPoint b{rng.uniform(-89, 89), rng.uniform(-180, 180)};
        GeoPoint c{rng.uniform(-89, 89), rng.uniform(-180, 180)};
        CHECK(geo::haversine_km(a, b) == geo::haversine_km(b, a));
        CHECK(geo::haversine_km(a, c) <=
              geo::haversine_km(a, b) + geo::haversine_km(b, c) + 1e-9);
    }
}

TEST_CASE("make_point rejects out-of-range coordinates") {
    CHECK_THROWS_AS(geo::make_point(90.5, 0), DataError);
    CHECK_THROWS_AS(geo::make_point(0, -180.5), DataError);
    CHECK_THROWS_AS(geo::make_point(std::nan(""), 0), DataError);
    CHECK(geo::make_point(-90, 180).lat == -90);
}

TEST_CASE("point_in_region: interior, exterior and boundary") {
    Region r = square("A", 0, 0, 1);
    CHECK(geo::point_in_region({0.5, 0.5}, r));
    CHECK_FALSE(geo::point_in_region({10.5, 0.5}, r));
    CHECK(geo::point_in_region({0.0, 0.5}, r));   // on an edge
    CHECK(geo::point_in_region({0.0, 0.0}, r));   // on a vertex
    CHECK(geo::point_in_region({0.5, 1.0}, r));   // right edge counts inside too
}

TEST_CASE("point_in_region is invariant under ring rotation") {
    Region r = square("A", 10, 20, 0.5);
    Rng rng(3);
    for (int rot = 0; rot < 4; ++rot) {
        Region rotated = r;
        std::rotate(rotated.ring.begin(), rotated.ring.begin() + rot, rotated.ring.end());
        for (int i = 0; i < 50; ++i) {
            GeoPoint p{rng.uniform(9.8, 10.7), rng.uniform(19.8, 20.7)};
            CHECK(geo::point_in_region(p, r) == geo::point_in_region(p, rotated));
        }
    }
}

TEST_CASE("assign_events basics") {
    std::vector<Region> regions = {square("0402", 0, 0, 1), square("0401", 0, 1, 1)};
    SUBCASE("point inside one region") {
        auto res = geo::assign_events(std::vector<GeoPoint>{{0.5, 0.5}}, regions);
        REQUIRE(res.region_index.size() == 1);
        CHECK(regions[res.region_index[0]].id == "0402");
        CHECK(res.unassigned_count == 0);
    }
    SUBCASE("point outside all regions") {
        auto res = geo::assign_events(std::vector<GeoPoint>{{5.0, 5.0}}, regions);
        CHECK(res.region_index[0] == -1);
        CHECK(res.unassigned_count == 1);
    }
    SUBCASE("shared border breaks the tie to the smallest id") {
        auto res = geo::assign_events(std::vector<GeoPoint>{{0.5, 1.0}}, regions);
        REQUIRE(res.region_index[0] >= 0);
        CHECK(regions[res.region_index[0]].id == "0401");
    }
    SUBCASE("empty region list is an error") {
        CHECK_THROWS_AS(geo::assign_events(std::vector<GeoPoint>{{0.5, 0.5}},
                                           std::vector<Region>{}),
                        DataError);
    }
}

TEST_CASE("assign_events output aligns with input and ids are valid") {
    std::vector<Region> regions;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            regions.push_back(square("R" + std::to_string(i) + std::to_string(j), i * 0.01,
                                     j * 0.01, 0.01));
    Rng rng(11);
    std::vector<GeoPoint> points;
    for (int i = 0; i < 500; ++i)
        points.push_back({rng.uniform(-0.02, 0.06), rng.uniform(-0.02, 0.06)});
    auto res = geo::assign_events(points, regions);
    CHECK(res.region_index.size() == points.size());
    std::size_t unassigned = 0;
    for (auto idx : res.region_index) {
        if (idx < 0) ++unassigned;
        else CHECK(idx < static_cast<std::int32_t>(regions.size()));
    }
    CHECK(unassigned == res.unassigned_count);
}

TEST_CASE("polygon area of a 0.01 degree square at the equator") {
    std::vector<GeoPoint> ring = {{0, 0}, {0, 0.01}, {0.01, 0.01}, {0.01, 0}};
    double area = geo::polygon_area_km2(ring);
    CHECK(area == doctest::Approx(1.237).epsilon(0.01));
}

TEST_CASE("polygon area is invariant under winding direction") {
    std::vector<GeoPoint> ccw = {{0, 0}, {0, 0.01}, {0.01, 0.01}, {0.01, 0}};
    std::vector<GeoPoint> cw(ccw.rbegin(), ccw.rend());
    CHECK(geo::polygon_area_km2(ccw) == geo::polygon_area_km2(cw));
}

TEST_CASE("degenerate rings raise a zero-area error") {
    std::vector<GeoPoint> collinear = {{0, 0}, {0, 1}, {0, 2}};
    CHECK_THROWS_AS(geo::polygon_area_km2(collinear), DataError);
    std::vector<GeoPoint> coincident = {{0, 0}, {0, 0}, {1, 1}};
    CHECK_THROWS_AS(geo::polygon_area_km2(coincident), DataError);
    std::vector<GeoPoint> too_short = {{0, 0}, {1, 1}};
    CHECK_THROWS_AS(geo::polygon_area_km2(too_short), DataError);
}

TEST_CASE("validate_region enforces the type invariants") {
    Region ok = square("X", 0, 0, 1);
    CHECK_NOTHROW(geo::validate_region(ok));
    Region closed = ok;
    closed.ring.push_back(closed.ring.front());
    CHECK_THROWS_AS(geo::validate_region(closed), DataError);
    Region negative_pop = ok;
    negative_pop.population = -1;
    CHECK_THROWS_AS(geo::validate_region(negative_pop), DataError);
    Region no_area = ok;
    no_area.area_km2 = 0.0;
    CHECK_THROWS_AS(geo::validate_region(no_area), DataError);
}

TEST_CASE("avg_min_distance: identical sets give zero") {
    std::vector<GeoPoint> pts = {{44.6, -63.6}, {44.7, -63.5}, {44.65, -63.55}};
    CHECK(geo::avg_min_distance_km(pts, pts) == 0.0);
}

TEST_CASE("avg_min_distance: single source takes the nearer target") {
    std::vector<GeoPoint> sources = {{44.6, -63.6}};
    std::vector<GeoPoint> targets = {{44.61, -63.6}, {44.9, -63.6}};
    double d1 = geo::haversine_km(sources[0], targets[0]);
    CHECK(geo::avg_min_distance_km(sources, targets) == d1);
}

TEST_CASE("avg_min_distance errors on empty inputs") {
    std::vector<GeoPoint> pts = {{0, 0}};
    CHECK_THROWS_AS(geo::avg_min_distance_km({}, pts), DataError);
    CHECK_THROWS_AS(geo::avg_min_distance_km(pts, {}), DataError);
}

TEST_CASE("avg_min_distance equals the brute-force scan (small, brute path)") {
    Rng rng(23);
    std::vector<GeoPoint> sources, targets;
    for (int i = 0; i < 5; ++i) sources.push_back({rng.uniform(44, 45), rng.uniform(-64, -63)});
    for (int i = 0; i < 7; ++i) targets.push_back({rng.uniform(44, 45), rng.uniform(-64, -63)});
    CHECK(geo::avg_min_distance_km(sources, targets) ==
          doctest::Approx(brute_avg_min(sources, targets)).epsilon(1e-12));
}

TEST_CASE("bucketed nearest-neighbor index matches brute force") {
    SUBCASE("dense city-scale targets") {
        Rng rng(31);
        std::vector<GeoPoint> sources, targets;
        for (int i = 0; i < 300; ++i)
            targets.push_back({rng.uniform(44.6, 44.7), rng.uniform(-63.7, -63.6)});
        for (int i = 0; i < 120; ++i)
            sources.push_back({rng.uniform(44.55, 44.75), rng.uniform(-63.75, -63.55)});
        CHECK(geo::avg_min_distance_km(sources, targets) ==
              doctest::Approx(brute_avg_min(sources, targets)).epsilon(1e-12));
    }
    SUBCASE("sparse targets force wide ring searches") {
        Rng rng(37);
        std::vector<GeoPoint> sources, targets;
        for (int i = 0; i < 80; ++i)
            targets.push_back({rng.uniform(-60, 60), rng.uniform(-170, 170)});
        for (int i = 0; i < 60; ++i)
            sources.push_back({rng.uniform(-60, 60), rng.uniform(-170, 170)});
        CHECK(geo::avg_min_distance_km(sources, targets) ==
              doctest::Approx(brute_avg_min(sources, targets)).epsilon(1e-12));
    }
    SUBCASE("near the dateline") {
        Rng rng(41);
        std::vector<GeoPoint> sources, targets;
        for (int i = 0; i < 100; ++i) {
            double lon = rng.bernoulli(0.5) ? rng.uniform(179.5, 180.0) : rng.uniform(-180.0, -179.5);
            targets.push_back({rng.uniform(-30, 30), lon});
        }
        for (int i = 0; i < 50; ++i) {
            double lon = rng.bernoulli(0.5) ? rng.uniform(179.0, 180.0) : rng.uniform(-180.0, -179.0);
            sources.push_back({rng.uniform(-30, 30), lon});
        }
        CHECK(geo::avg_min_distance_km(sources, targets) ==
              doctest::Approx(brute_avg_min(sources, targets)).epsilon(1e-12));
    }
    SUBCASE("high latitudes fall back to brute force") {
        Rng rng(43);
        std::vector<GeoPoint> sources, targets;
        for (int i = 0; i < 120; ++i)
            targets.push_back({rng.uniform(80, 90), rng.uniform(-180, 180)});
        for (int i = 0; i < 40; ++i)
            sources.push_back({rng.uniform(75, 90), rng.uniform(-180, 180)});
        CHECK(geo::avg_min_distance_km(sources, targets) ==
              doctest::Approx(brute_avg_min(sources, targets)).epsilon(1e-12));
    }
}
