#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "crimegrid/errors.hpp"
#include "crimegrid/geo.hpp"
#include "crimegrid/ingest.hpp"
#include "crimegrid/synth.hpp"

using namespace crimegrid;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("crimegrid_synth_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

std::string read_all(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

synth::CityConfig small_config(std::uint64_t seed) {
    synth::CityConfig cfg;
    cfg.grid_size = 3;
    cfg.n_years = 1;
    cfg.seed = seed;
    cfg.base_rate = 0.10;
    cfg.users = 40;
    return cfg;
}

// per-region crime counts computed from the emitted files
std::map<std::string, long long> crimes_per_region(const std::string& dir) {
    auto regions = ingest::parse_regions(dir + "/regions.geojson");
    auto crimes = ingest::parse_crimes(dir + "/crimes.csv", TimeBinning::default_binning());
    std::vector<geo::GeoPoint> pts;
    for (const auto& c : crimes.records) pts.push_back(c.location);
    auto assign = geo::assign_events(pts, regions);
    std::map<std::string, long long> counts;
    for (const auto& r : regions) counts[r.id] = 0;
    for (auto idx : assign.region_index) {
        REQUIRE(idx >= 0);
        ++counts[regions[idx].id];
    }
    return counts;
}

}  // namespace

TEST_CASE("config validation") {
    synth::CityConfig cfg;
    CHECK_NOTHROW(synth::validate_config(cfg));
    cfg.grid_size = 1;
    CHECK_THROWS_AS(synth::validate_config(cfg), ConfigError);
    cfg = {};
    cfg.base_rate = 1.5;
    CHECK_THROWS_AS(synth::validate_config(cfg), ConfigError);
    cfg = {};
    cfg.weights.streetlight = std::nan("");
    CHECK_THROWS_AS(synth::validate_config(cfg), ConfigError);
}

TEST_CASE("fixed seed gives byte-identical output files") {
    TempDir a("det_a"), b("det_b");
    auto cfg = small_config(77);
    synth::generate(cfg, a.str());
    synth::generate(cfg, b.str());
    for (const char* name : {"regions.geojson", "crimes.csv", "streetlights.csv", "pois.csv",
                             "checkins.csv", "demographics.csv", "truth_manifest.json"}) {
        INFO(name);
        CHECK(read_all(a.str() + "/" + name) == read_all(b.str() + "/" + name));
    }
    auto cfg2 = cfg;
    cfg2.seed = 78;
    TempDir c("det_c");
    synth::generate(cfg2, c.str());
    CHECK(read_all(a.str() + "/crimes.csv") != read_all(c.str() + "/crimes.csv"));
}

TEST_CASE("emitted files parse cleanly with zero rejected rows") {
    TempDir tmp("parse");
    synth::CityConfig cfg;
    cfg.grid_size = 4;
    cfg.n_years = 2;
    cfg.seed = 3;
    auto manifest = synth::generate(cfg, tmp.str());

    auto regions = ingest::parse_regions(tmp.str() + "/regions.geojson");
    CHECK(regions.size() == 16);
    auto crimes = ingest::parse_crimes(tmp.str() + "/crimes.csv", TimeBinning::default_binning());
    CHECK(crimes.stats.rejected == 0);
    CHECK(static_cast<long long>(crimes.records.size()) == manifest.crimes);
    auto lights = ingest::parse_streetlights(tmp.str() + "/streetlights.csv");
    CHECK(lights.stats.rejected == 0);
    CHECK(static_cast<long long>(lights.records.size()) == manifest.streetlights);
    auto pois = ingest::parse_pois(tmp.str() + "/pois.csv");
    CHECK(pois.stats.rejected == 0);
    CHECK(static_cast<long long>(pois.records.size()) == manifest.pois);
    auto checkins = ingest::parse_checkins(tmp.str() + "/checkins.csv", pois.records);
    CHECK(checkins.stats.rejected == 0);
    CHECK(static_cast<long long>(checkins.records.size()) == manifest.checkins);
    auto demo = ingest::parse_demographics(tmp.str() + "/demographics.csv");
    CHECK(demo.stats.rejected == 0);
    CHECK(demo.stats.imputed_cells == 0);
    CHECK(demo.records.size() == 16);

    // every event lands inside some region
    std::vector<geo::GeoPoint> pts;
    for (const auto& c : crimes.records) pts.push_back(c.location);
    auto assign = geo::assign_events(pts, regions);
    CHECK(assign.unassigned_count == 0);
}

TEST_CASE("emitted region areas match polygon_area_km2 within 1%") {
    TempDir tmp("area");
    auto cfg = small_config(5);
    synth::generate(cfg, tmp.str());
    auto regions = ingest::parse_regions(tmp.str() + "/regions.geojson");
    for (const auto& r : regions) {
        double computed = geo::polygon_area_km2(r.ring);
        CHECK(std::abs(r.area_km2 - computed) / computed < 0.01);
    }
}

TEST_CASE("null city: zero planted weights give statistically uniform crime rates") {
    // chi-square over pooled per-region counts across 20 seeded runs;
    // critical value for df = 3 at p = 0.01 is 11.345
    std::map<std::string, long long> pooled;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        TempDir tmp("null_" + std::to_string(seed));
        synth::CityConfig cfg;
        cfg.grid_size = 2;
        cfg.n_years = 1;
        cfg.seed = seed;
        cfg.base_rate = 0.10;
        cfg.users = 20;
        synth::generate(cfg, tmp.str());
        for (const auto& [id, count] : crimes_per_region(tmp.str())) pooled[id] += count;
    }
    REQUIRE(pooled.size() == 4);
    double total = 0;
    for (const auto& [id, count] : pooled) total += static_cast<double>(count);
    double expected = total / 4.0;
    double chi2 = 0;
    for (const auto& [id, count] : pooled) {
        double d = static_cast<double>(count) - expected;
        chi2 += d * d / expected;
    }
    CHECK(chi2 < 11.345);
}

TEST_CASE("planted streetlight suppression shows up as a negative correlation") {
    TempDir tmp("light");
    synth::CityConfig cfg;
    cfg.grid_size = 6;
    cfg.n_years = 2;
    cfg.seed = 11;
    cfg.base_rate = 0.12;
    cfg.weights.streetlight = -0.9;
    auto manifest = synth::generate(cfg, tmp.str());
    CHECK(manifest.streetlight_effect_sign == -1);

    auto regions = ingest::parse_regions(tmp.str() + "/regions.geojson");
    auto lights = ingest::parse_streetlights(tmp.str() + "/streetlights.csv");
    std::vector<geo::GeoPoint> pts;
    for (const auto& l : lights.records) pts.push_back(l.location);
    auto assign = geo::assign_events(pts, regions);
    std::map<std::string, double> density;
    for (const auto& r : regions) density[r.id] = 0;
    for (auto idx : assign.region_index)
        if (idx >= 0) density[regions[idx].id] += 1.0;
    for (auto& [id, v] : density) v /= 0.88;  // identical areas, scale is irrelevant

    auto counts = crimes_per_region(tmp.str());
    double mx = 0, my = 0, n = static_cast<double>(regions.size());
    for (const auto& r : regions) {
        mx += density[r.id];
        my += static_cast<double>(counts[r.id]);
    }
    mx /= n;
    my /= n;
    double cov = 0, vx = 0, vy = 0;
    for (const auto& r : regions) {
        double dx = density[r.id] - mx;
        double dy = static_cast<double>(counts[r.id]) - my;
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    double corr = cov / std::sqrt(vx * vy);
    CHECK(corr < -0.3);
}

TEST_CASE("pois and check-ins cluster toward the downtown corner") {
    TempDir tmp("downtown");
    synth::CityConfig cfg;
    cfg.grid_size = 6;
    cfg.n_years = 1;
    cfg.seed = 9;
    synth::generate(cfg, tmp.str());
    auto regions = ingest::parse_regions(tmp.str() + "/regions.geojson");
    auto pois = ingest::parse_pois(tmp.str() + "/pois.csv");
    std::vector<geo::GeoPoint> pts;
    for (const auto& v : pois.records) pts.push_back(v.location);
    auto assign = geo::assign_events(pts, regions);
    std::map<std::string, long long> counts;
    for (auto idx : assign.region_index)
        if (idx >= 0) ++counts[regions[idx].id];
    // DA0001 is the downtown corner, DA0036 the far corner
    CHECK(counts["DA0001"] > counts["DA0036"] + 5);
}

TEST_CASE("truth manifest records the planted configuration") {
    TempDir tmp("manifest");
    synth::CityConfig cfg;
    cfg.grid_size = 3;
    cfg.n_years = 1;
    cfg.seed = 21;
    cfg.weights.demographic_interaction = 1.2;
    cfg.weights.streetlight = -0.4;
    auto manifest = synth::generate(cfg, tmp.str());
    CHECK(manifest.demographic_effect_sign == 1);
    CHECK(manifest.regions == 9);
    auto text = read_all(tmp.str() + "/truth_manifest.json");
    CHECK(text.find("\"demographic_interaction\": 1.2") != std::string::npos);
    CHECK(text.find("\"streetlight\": -0.4") != std::string::npos);
    CHECK(text.find("\"crimes\": " + std::to_string(manifest.crimes)) != std::string::npos);
}
