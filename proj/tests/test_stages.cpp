#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "crimegrid/config.hpp"
#include "crimegrid/errors.hpp"
#include "crimegrid/stages.hpp"

using namespace crimegrid;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("crimegrid_stage_" + tag);
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

json fast_config(const std::string& out_dir) {
    return json{
        {"seed", 17},
        {"jobs", 2},
        {"out_dir", out_dir},
        {"synth",
         {{"grid_size", 3},
          {"n_years", 3},
          {"base_rate", 0.12},
          {"noise", 0.1},
          {"weights",
           {{"demographic", 0.3}, {"demographic_interaction", 1.0}, {"streetlight", -0.4}}}}},
        {"dataset", {{"n_folds", 3}, {"undersample_ratio", 1.0}}},
        {"train",
         {{"models", {"MR", "MD", "MA"}},
          {"classifiers", {"forest", "gbm", "mlp_baseline"}},
          {"forest", {{"n_trees", 8}, {"max_depth", 6}, {"min_leaf", 2}}},
          {"gbm", {{"n_rounds", 10}, {"learning_rate", 0.2}}},
          {"mlp",
           {{"epochs", 2},
            {"encoder_width", 4},
            {"joint1", 6},
            {"joint2", 3},
            {"batch_size", 128}}}}}};
}

}  // namespace

TEST_CASE("config parsing rejects unknown keys at every level") {
    json doc = fast_config("out");
    CHECK_NOTHROW(config_from_json(doc));
    SUBCASE("top level") {
        doc["surprise"] = 1;
        CHECK_THROWS_AS(config_from_json(doc), ConfigError);
    }
    SUBCASE("nested synth") {
        doc["synth"]["grid"] = 4;
        CHECK_THROWS_AS(config_from_json(doc), ConfigError);
    }
    SUBCASE("nested train.gbm") {
        doc["train"]["gbm"]["rounds"] = 4;
        CHECK_THROWS_AS(config_from_json(doc), ConfigError);
    }
    SUBCASE("weights") {
        doc["synth"]["weights"]["lights"] = 0.2;
        CHECK_THROWS_AS(config_from_json(doc), ConfigError);
    }
}

TEST_CASE("config validation errors") {
    json doc = fast_config("out");
    SUBCASE("bad model name") {
        doc["train"]["models"] = {"MZ"};
        CHECK_THROWS_AS(config_from_json(doc), ConfigError);
    }
    SUBCASE("bad classifier") {
        doc["train"]["classifiers"] = {"svm"};
        CHECK_THROWS_AS(config_from_json(doc), ConfigError);
    }
    SUBCASE("undersample ratio below one") {
        doc["dataset"]["undersample_ratio"] = 0.4;
        CHECK_THROWS_AS(config_from_json(doc), ConfigError);
    }
    SUBCASE("threshold out of range") {
        doc["eval"] = {{"threshold", 1.5}};
        CHECK_THROWS_AS(config_from_json(doc), ConfigError);
    }
    SUBCASE("years required without synth") {
        json d2 = {{"seed", 1}};
        CHECK_THROWS_AS(config_from_json(d2), ConfigError);
    }
    SUBCASE("bad report format") {
        doc["report"] = {{"formats", {"pdf"}}};
        CHECK_THROWS_AS(config_from_json(doc), ConfigError);
    }
    SUBCASE("season map must cover all months") {
        doc["binning"] = {{"season_map", {{"1", "winter"}}}};
        CHECK_THROWS_AS(config_from_json(doc), ConfigError);
    }
}

TEST_CASE("config defaults resolve from the synth section") {
    auto cfg = config_from_json(fast_config("outdir"));
    CHECK(cfg.dataset.years == std::vector<int>{2012, 2013, 2014});
    CHECK(cfg.inputs.crimes == "outdir/synth/crimes.csv");
    CHECK(cfg.train.params.forest.n_trees == 8);
    CHECK(cfg.train.params.gbm.learning_rate == 0.2);
    CHECK(cfg.synth_config.seed == 17);  // master seed flows into synth
}

TEST_CASE("config slices hash deterministically and track dependencies") {
    auto cfg = config_from_json(fast_config("out"));
    auto h1 = config_hash_hex(config_slice(cfg, "dataset"));
    auto h2 = config_hash_hex(config_slice(cfg, "dataset"));
    CHECK(h1 == h2);
    auto cfg2 = cfg;
    cfg2.dataset.n_folds = 5;
    CHECK(config_hash_hex(config_slice(cfg2, "dataset")) != h1);
    // train slice depends on the dataset slice
    CHECK(config_hash_hex(config_slice(cfg2, "train")) !=
          config_hash_hex(config_slice(cfg, "train")));
    // report threshold does not disturb the dataset slice
    auto cfg3 = cfg;
    cfg3.eval_config.threshold = 0.4;
    CHECK(config_hash_hex(config_slice(cfg3, "dataset")) == h1);
}

TEST_CASE("missing artifacts map to exit code 3") {
    TempDir tmp("missing");
    auto cfg = config_from_json(fast_config(tmp.str() + "/out"));
    CHECK(cmd_eval(cfg) == 3);
    CHECK(cmd_train(cfg) == 3);
    CHECK(cmd_report(cfg) == 3);
    CHECK(cmd_features(cfg) == 3);  // inputs do not exist yet
}

TEST_CASE("synth without a synth section is a config error") {
    TempDir tmp("nosynth");
    json doc = {{"seed", 1}, {"out_dir", tmp.str()}, {"dataset", {{"years", {2012, 2013, 2014}}}}};
    auto cfg = config_from_json(doc);
    CHECK(cmd_synth(cfg) == 2);
}

TEST_CASE("full staged pipeline produces reports and is re-run deterministic") {
    TempDir tmp("pipeline");
    auto cfg = config_from_json(fast_config(tmp.str() + "/out"));

    CHECK(cmd_synth(cfg) == 0);
    CHECK(cmd_features(cfg) == 0);
    CHECK(cmd_dataset(cfg) == 0);
    CHECK(cmd_train(cfg) == 0);
    CHECK(cmd_eval(cfg) == 0);
    CHECK(cmd_report(cfg) == 0);

    std::string out = tmp.str() + "/out";
    CHECK(fs::exists(out + "/features/region_features.csv"));
    CHECK(fs::exists(out + "/dataset/grid.csv"));
    CHECK(fs::exists(out + "/dataset/folds.json"));
    CHECK(fs::exists(out + "/train/scores_MA_gbm.bin"));
    CHECK(fs::exists(out + "/eval/eval_report.json"));
    CHECK(fs::exists(out + "/report/report_table3.md"));
    CHECK(fs::exists(out + "/report/run_manifest.json"));

    auto report = eval::read_eval_report_json(out + "/eval/eval_report.json");
    CHECK(report.rows.size() == 7);  // 3 models x 2 classifiers + MLP on MA
    CHECK(report.find("MA", "mlp_baseline") != nullptr);
    CHECK(report.find("MR", "gbm") != nullptr);

    // markdown and csv renderings carry identical numbers
    auto md = read_all(out + "/report/report_table3.md");
    auto cs = read_all(out + "/report/report_table3.csv");
    const auto* row = report.find("MD", "gbm");
    REQUIRE(row != nullptr);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", row->mean.accuracy);
    CHECK(md.find(buf) != std::string::npos);
    CHECK(cs.find(buf) != std::string::npos);

    // byte-determinism of artifacts across re-runs
    auto grid_before = read_all(out + "/dataset/grid.csv");
    auto table_before = read_all(out + "/report/report_table3.md");
    auto scores_before = read_all(out + "/train/scores_MD_forest.bin");
    CHECK(cmd_dataset(cfg) == 0);
    CHECK(cmd_train(cfg) == 0);
    CHECK(cmd_eval(cfg) == 0);
    CHECK(cmd_report(cfg) == 0);
    CHECK(read_all(out + "/dataset/grid.csv") == grid_before);
    CHECK(read_all(out + "/report/report_table3.md") == table_before);
    CHECK(read_all(out + "/train/scores_MD_forest.bin") == scores_before);
}

TEST_CASE("cmd_pipeline on a G=4 three-year city emits the report tables") {
    TempDir tmp("pipe4");
    json doc = {
        {"seed", 23},
        {"jobs", 2},
        {"out_dir", tmp.str() + "/out"},
        {"synth",
         {{"grid_size", 4},
          {"n_years", 3},
          {"base_rate", 0.12},
          {"weights", {{"demographic_interaction", 1.5}}}}},
        {"dataset", {{"n_folds", 10}}},
        {"train",
         {{"forest", {{"n_trees", 6}, {"max_depth", 5}, {"min_leaf", 4}}},
          {"gbm", {{"n_rounds", 8}, {"learning_rate", 0.2}}},
          {"mlp",
           {{"epochs", 2}, {"encoder_width", 4}, {"joint1", 6}, {"joint2", 3},
            {"batch_size", 256}}}}}};
    auto cfg = config_from_json(doc);
    CHECK(cmd_pipeline(cfg) == 0);
    CHECK(fs::exists(tmp.str() + "/out/report/report_table3.md"));
    CHECK(fs::exists(tmp.str() + "/out/report/report_table3.csv"));
    CHECK(fs::exists(tmp.str() + "/out/report/report_table4.md"));
    auto report = eval::read_eval_report_json(tmp.str() + "/out/eval/eval_report.json");
    CHECK(report.rows.size() == 25);
    CHECK(report.n_folds == 10);
}

TEST_CASE("dataset stage can materialize fold matrices") {
    TempDir tmp("matrices");
    json doc = fast_config(tmp.str() + "/out");
    doc["dataset"]["export_matrices"] = true;
    doc["dataset"]["n_folds"] = 3;
    auto cfg = config_from_json(doc);
    REQUIRE(cmd_synth(cfg) == 0);
    REQUIRE(cmd_dataset(cfg) == 0);
    for (int f = 0; f < 3; ++f) {
        CHECK(fs::exists(tmp.str() + "/out/dataset/fold" + std::to_string(f) + "_train.csv"));
        CHECK(fs::exists(tmp.str() + "/out/dataset/fold" + std::to_string(f) + "_test.csv"));
    }
    auto head = read_all(tmp.str() + "/out/dataset/fold0_train.csv");
    CHECK(head.rfind("region_id,year,month,weekday,interval,", 0) == 0);
    CHECK(head.find(",label") != std::string::npos);
}

TEST_CASE("config drift between stages is detected") {
    TempDir tmp("drift");
    auto cfg = config_from_json(fast_config(tmp.str() + "/out"));
    REQUIRE(cmd_synth(cfg) == 0);
    REQUIRE(cmd_dataset(cfg) == 0);
    auto drifted = cfg;
    drifted.dataset.n_folds = 2;
    CHECK(cmd_train(drifted) == 4);  // dataset artifacts no longer match
}

TEST_CASE("grid csv round trip preserves cells") {
    TempDir tmp("gridio");
    auto cfg = config_from_json(fast_config(tmp.str() + "/out"));
    REQUIRE(cmd_synth(cfg) == 0);
    auto city = load_city(cfg);
    auto grid = dataset::build_grid(city.crimes, static_cast<std::int32_t>(city.regions.size()),
                                    cfg.dataset.years);
    std::vector<std::string> ids;
    for (const auto& r : city.regions) ids.push_back(r.id);
    write_grid_csv(tmp.str() + "/grid.csv", grid, ids);
    auto back = read_grid_csv(tmp.str() + "/grid.csv", city);
    REQUIRE(back.cells.size() == grid.cells.size());
    CHECK(back.years == grid.years);
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        CHECK(back.cells[i].key == grid.cells[i].key);
        CHECK(back.cells[i].crime_count == grid.cells[i].crime_count);
    }
}

TEST_CASE("scores file round trip") {
    TempDir tmp("scoresio");
    eval::CvDriver::ScoreSet set;
    set.model = "MD";
    set.classifier = "gbm";
    set.fold_scores = {{0.25f, 0.5f, 0.75f}, {0.1f, 0.9f}};
    std::vector<int> folds = {0, 1};
    write_scores_file(tmp.str() + "/s.bin", set, folds);
    std::vector<int> folds_back;
    auto back = read_scores_file(tmp.str() + "/s.bin", folds_back);
    CHECK(folds_back == folds);
    CHECK(back.fold_scores == set.fold_scores);
    CHECK_THROWS_AS(read_scores_file(tmp.str() + "/nope.bin", folds_back),
                    MissingArtifactError);
}

TEST_CASE("search config is honored end to end") {
    TempDir tmp("search");
    auto doc = fast_config(tmp.str() + "/out");
    doc["dataset"]["n_folds"] = 1;
    doc["train"]["models"] = {"MR"};
    doc["train"]["classifiers"] = {"gbm"};
    doc["train"]["search"] = {
        {"enabled", true},
        {"n_samples", 2},
        {"gbm", {{"learning_rate", {0.05, 0.3}}, {"max_depth", {2, 3}}}}};
    auto cfg = config_from_json(doc);
    REQUIRE(cmd_synth(cfg) == 0);
    REQUIRE(cmd_dataset(cfg) == 0);
    CHECK(cmd_train(cfg) == 0);
    CHECK(cmd_eval(cfg) == 0);
    auto report = eval::read_eval_report_json(tmp.str() + "/out/eval/eval_report.json");
    CHECK(report.rows.size() == 1);
}
