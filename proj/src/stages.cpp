#include "crimegrid/stages.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "crimegrid/csv.hpp"
#include "crimegrid/errors.hpp"
#include "crimegrid/ingest.hpp"
#include "crimegrid/rng.hpp"
#include "crimegrid/synth.hpp"

namespace crimegrid {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void require_file(const std::string& path, const std::string& hint) {
    if (!fs::exists(path))
        throw MissingArtifactError("missing " + path + " (" + hint + ")");
}

void write_stage_manifest(const RunConfig& cfg, const std::string& stage, json extras) {
    extras["stage"] = stage;
    extras["config_hash"] = config_hash_hex(config_slice(cfg, stage));
    std::string dir = cfg.out_dir + "/" + stage;
    fs::create_directories(dir);
    std::ofstream out(dir + "/manifest.json", std::ios::binary);
    if (!out) throw DataError("cannot write " + dir + "/manifest.json");
    out << extras.dump(2) << '\n';
}

json read_stage_manifest(const RunConfig& cfg, const std::string& stage) {
    std::string path = cfg.out_dir + "/" + stage + "/manifest.json";
    require_file(path, "run the " + stage + " stage first");
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw DataError(path + ": invalid manifest: " + e.what());
    }
    std::string expected = config_hash_hex(config_slice(cfg, stage));
    if (doc.value("config_hash", "") != expected)
        throw DataError(path + ": artifact was produced under a different configuration; re-run the " +
                        stage + " stage");
    return doc;
}

MonthWindow years_window(const RunConfig& cfg) {
    int lo = month_index(cfg.dataset.years.front(), 1);
    int hi = month_index(cfg.dataset.years.back(), 12) + 1;
    return MonthWindow{lo, hi};
}

}  // namespace

features::CityData load_city(const RunConfig& cfg) {
    for (const std::string& path :
         {cfg.inputs.regions, cfg.inputs.crimes, cfg.inputs.streetlights, cfg.inputs.pois,
          cfg.inputs.checkins, cfg.inputs.demographics})
        require_file(path, "input file");

    auto regions = ingest::parse_regions(cfg.inputs.regions);
    auto crimes = ingest::parse_crimes(cfg.inputs.crimes, cfg.binning,
                                        cfg.timezone_offset_minutes);
    auto lights = ingest::parse_streetlights(cfg.inputs.streetlights);
    auto pois = ingest::parse_pois(cfg.inputs.pois);
    auto checkins = ingest::parse_checkins(cfg.inputs.checkins, pois.records);
    auto demographics = ingest::parse_demographics(cfg.inputs.demographics);

    std::cerr << "[ingest] regions=" << regions.size() << " crimes=" << crimes.records.size()
              << " (rejected " << crimes.stats.rejected << ")"
              << " lights=" << lights.records.size() << " pois=" << pois.records.size()
              << " checkins=" << checkins.records.size() << " (orphans "
              << checkins.stats.rejected_orphan_venue << ")"
              << " demographics=" << demographics.records.size() << " (imputed cells "
              << demographics.stats.imputed_cells << ")\n";

    return features::assemble_city(std::move(regions), crimes.records, lights.records,
                                   pois.records, checkins.records, demographics.records,
                                   cfg.binning, cfg.timezone_offset_minutes);
}

void run_synth_stage(const RunConfig& cfg) {
    if (!cfg.has_synth) throw ConfigError("config has no synth section");
    std::string dir = cfg.out_dir + "/synth";
    auto manifest = synth::generate(cfg.synth_config, dir);
    std::cerr << "[synth] regions=" << manifest.regions << " crimes=" << manifest.crimes
              << " lights=" << manifest.streetlights << " pois=" << manifest.pois
              << " checkins=" << manifest.checkins << "\n";
    write_stage_manifest(cfg, "synth",
                         json{{"counts",
                               {{"regions", manifest.regions},
                                {"crimes", manifest.crimes},
                                {"streetlights", manifest.streetlights},
                                {"pois", manifest.pois},
                                {"checkins", manifest.checkins}}}});
}

void run_features_stage(const RunConfig& cfg) {
    auto city = load_city(cfg);
    auto table = features::build_region_features(city, years_window(cfg), cfg.feature_options);
    std::string dir = cfg.out_dir + "/features";
    fs::create_directories(dir);
    features::write_region_features_csv(dir + "/region_features.csv", table);
    std::cerr << "[features] regions=" << table.rows.size()
              << " schema_columns=" << table.schema.size() << "\n";
    write_stage_manifest(cfg, "features",
                         json{{"regions", table.rows.size()},
                              {"schema_columns", table.schema.size()},
                              {"outputs", {"region_features.csv", "region_features.csv.schema.csv"}}});
}

void write_grid_csv(const std::string& path, const dataset::Grid& grid,
                    std::span<const std::string> region_ids) {
    CsvWriter w(path);
    w.write_row({"region_id", "year", "month", "weekday", "interval", "crime_count", "label"});
    for (const auto& cell : grid.cells) {
        w.write_row({region_ids[cell.key.region], std::to_string(cell.key.year),
                     std::to_string(cell.key.month), std::to_string(cell.key.weekday),
                     std::to_string(cell.key.interval), std::to_string(cell.crime_count),
                     cell.label() ? "1" : "0"});
    }
}

dataset::Grid read_grid_csv(const std::string& path, const features::CityData& city) {
    CsvTable table = read_csv_file(path);
    std::vector<std::string> expected = {"region_id", "year",     "month", "weekday",
                                         "interval",  "crime_count", "label"};
    if (table.header != expected) throw DataError(path + ": unexpected grid header");

    std::vector<int> years;
    for (const auto& row : table.rows) {
        auto y = parse_int_strict(row[1]);
        if (!y) throw DataError(path + ": bad year value");
        if (years.empty() || years.back() != static_cast<int>(*y)) {
            if (std::find(years.begin(), years.end(), static_cast<int>(*y)) == years.end())
                years.push_back(static_cast<int>(*y));
        }
    }
    std::sort(years.begin(), years.end());

    dataset::Grid grid;
    grid.n_regions = static_cast<std::int32_t>(city.regions.size());
    grid.years = years;
    std::size_t expected_cells =
        city.regions.size() * years.size() * 12u * 7u * 8u;
    if (table.rows.size() != expected_cells)
        throw DataError(path + ": grid row count does not match |years|*12*7*8*|regions|");
    grid.cells.reserve(expected_cells);
    for (const auto& row : table.rows) {
        int region = city.region_index(row[0]);
        if (region < 0) throw DataError(path + ": unknown region id " + row[0]);
        auto y = parse_int_strict(row[1]);
        auto m = parse_int_strict(row[2]);
        auto wd = parse_int_strict(row[3]);
        auto t = parse_int_strict(row[4]);
        auto count = parse_int_strict(row[5]);
        if (!y || !m || !wd || !t || !count) throw DataError(path + ": malformed grid row");
        dataset::GridCell cell;
        cell.key = dataset::CellKey{region, static_cast<std::int16_t>(*y),
                                    static_cast<std::int8_t>(*m), static_cast<std::int8_t>(*wd),
                                    static_cast<std::int8_t>(*t)};
        cell.crime_count = static_cast<std::int32_t>(*count);

        // the canonical layout is positional; downstream fold slicing relies on it
        std::size_t i = grid.cells.size();
        std::size_t per_year = 12u * 7u * 8u;
        std::size_t per_region = years.size() * per_year;
        std::size_t expect_region = i / per_region;
        std::size_t rem = i % per_region;
        int expect_year = years[rem / per_year];
        rem %= per_year;
        int expect_month = static_cast<int>(rem / 56) + 1;
        int expect_wd = static_cast<int>((rem % 56) / 8);
        int expect_t = static_cast<int>(rem % 8);
        if (region != static_cast<int>(expect_region) || *y != expect_year ||
            *m != expect_month || *wd != expect_wd || *t != expect_t)
            throw DataError(path + ": grid rows are not in canonical cell order");
        grid.cells.push_back(cell);
    }
    return grid;
}

void write_folds_json(const std::string& path, std::span<const dataset::FoldSpec> folds,
                      std::span<const int> years) {
    json doc;
    doc["format"] = "crimegrid_folds_v1";
    doc["years"] = std::vector<int>(years.begin(), years.end());
    json list = json::array();
    for (const auto& f : folds) {
        list.push_back(json{{"fold", f.fold_index},
                            {"train", {f.train.begin, f.train.end}},
                            {"test", {f.test.begin, f.test.end}}});
    }
    doc["folds"] = std::move(list);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << doc.dump(2) << '\n';
}

std::vector<dataset::FoldSpec> read_folds_json(const std::string& path) {
    require_file(path, "run the dataset stage first");
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw DataError(path + ": invalid folds file: " + e.what());
    }
    if (doc.value("format", "") != "crimegrid_folds_v1")
        throw DataError(path + ": unsupported folds format");
    std::vector<dataset::FoldSpec> folds;
    for (const auto& f : doc.at("folds")) {
        dataset::FoldSpec spec;
        spec.fold_index = f.at("fold").get<int>();
        spec.train = MonthWindow{f.at("train").at(0).get<int>(), f.at("train").at(1).get<int>()};
        spec.test = MonthWindow{f.at("test").at(0).get<int>(), f.at("test").at(1).get<int>()};
        folds.push_back(spec);
    }
    return folds;
}

void run_dataset_stage(const RunConfig& cfg) {
    auto city = load_city(cfg);
    auto grid = dataset::build_grid(city.crimes, static_cast<std::int32_t>(city.regions.size()),
                                    cfg.dataset.years);
    auto folds = dataset::make_folds(years_window(cfg), cfg.dataset.n_folds);

    std::string dir = cfg.out_dir + "/dataset";
    fs::create_directories(dir);
    std::vector<std::string> region_ids;
    for (const auto& r : city.regions) region_ids.push_back(r.id);
    write_grid_csv(dir + "/grid.csv", grid, region_ids);
    write_folds_json(dir + "/folds.json", folds, cfg.dataset.years);

    if (cfg.dataset.export_matrices) {
        eval::CvOptions opt;
        opt.undersample_ratio = cfg.dataset.undersample_ratio;
        opt.paper_mode = cfg.paper_mode;
        opt.jobs = cfg.jobs;
        opt.seed = cfg.seed;
        opt.feature_options = cfg.feature_options;
        eval::CvDriver driver(city, grid, folds, opt);
        for (const auto& fold : folds) {
            auto data = driver.build_fold(fold);
            write_matrix_csv(dir + "/fold" + std::to_string(fold.fold_index) + "_train.csv",
                             data.train, grid, data.train_cells, region_ids);
            write_matrix_csv(dir + "/fold" + std::to_string(fold.fold_index) + "_test.csv",
                             data.test, grid, data.test_cells, region_ids);
        }
    }

    std::cerr << "[dataset] cells=" << grid.cells.size() << " crime_cells=" << grid.crime_cells()
              << " folds=" << folds.size() << "\n";
    write_stage_manifest(cfg, "dataset",
                         json{{"cells", grid.cells.size()},
                              {"crime_cells", grid.crime_cells()},
                              {"folds", folds.size()},
                              {"outputs", {"grid.csv", "folds.json"}}});
}

namespace {

constexpr char kScoresMagic[8] = {'C', 'G', 'S', 'C', '0', '0', '0', '1'};

}  // namespace

void write_scores_file(const std::string& path, const eval::CvDriver::ScoreSet& set,
                       std::span<const int> fold_ids) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write scores file: " + path);
    out.write(kScoresMagic, sizeof(kScoresMagic));
    std::uint32_t n_folds = static_cast<std::uint32_t>(set.fold_scores.size());
    out.write(reinterpret_cast<const char*>(&n_folds), sizeof(n_folds));
    for (std::size_t i = 0; i < set.fold_scores.size(); ++i) {
        std::int32_t fold = fold_ids[i];
        std::uint64_t n = set.fold_scores[i].size();
        out.write(reinterpret_cast<const char*>(&fold), sizeof(fold));
        out.write(reinterpret_cast<const char*>(&n), sizeof(n));
        out.write(reinterpret_cast<const char*>(set.fold_scores[i].data()),
                  static_cast<std::streamsize>(n * sizeof(float)));
    }
}

eval::CvDriver::ScoreSet read_scores_file(const std::string& path, std::vector<int>& fold_ids) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("missing scores file: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kScoresMagic, sizeof(magic)) != 0)
        throw DataError(path + ": not a crimegrid scores file");
    std::uint32_t n_folds = 0;
    in.read(reinterpret_cast<char*>(&n_folds), sizeof(n_folds));
    eval::CvDriver::ScoreSet set;
    fold_ids.clear();
    for (std::uint32_t i = 0; i < n_folds; ++i) {
        std::int32_t fold = 0;
        std::uint64_t n = 0;
        in.read(reinterpret_cast<char*>(&fold), sizeof(fold));
        in.read(reinterpret_cast<char*>(&n), sizeof(n));
        if (!in) throw DataError(path + ": truncated scores file");
        std::vector<float> scores(n);
        in.read(reinterpret_cast<char*>(scores.data()),
                static_cast<std::streamsize>(n * sizeof(float)));
        if (!in) throw DataError(path + ": truncated scores file");
        fold_ids.push_back(fold);
        set.fold_scores.push_back(std::move(scores));
    }
    return set;
}

namespace {

eval::CvOptions cv_options(const RunConfig& cfg) {
    eval::CvOptions opt;
    opt.undersample_ratio = cfg.dataset.undersample_ratio;
    opt.paper_mode = cfg.paper_mode;
    opt.threshold = cfg.eval_config.threshold;
    opt.jobs = cfg.jobs;
    opt.seed = cfg.seed;
    opt.feature_options = cfg.feature_options;
    return opt;
}

// Randomized hyperparameter search on fold 0's train window: the first ten
// months fit candidates, the last two months validate by F-score.
void apply_random_search(const RunConfig& cfg, const features::CityData& city,
                         const dataset::Grid& grid,
                         std::span<const dataset::FoldSpec> folds,
                         eval::LearnerParams& params) {
    const auto& search = cfg.train.search;
    if (!search.enabled) return;
    MonthWindow train0 = folds.front().train;
    dataset::FoldSpec inner;
    inner.fold_index = -1;
    inner.train = MonthWindow{train0.begin, train0.end - 2};
    inner.test = MonthWindow{train0.end - 2, train0.end};

    eval::CvOptions opt = cv_options(cfg);
    opt.jobs = 1;
    eval::CvDriver driver(city, grid, {inner}, opt);
    auto data = driver.build_fold(inner);

    auto validation_fscore = [&](const dataset::FeatureMatrix& train,
                                 const dataset::FeatureMatrix& test,
                                 const std::function<std::vector<double>()>& fit) {
        (void)train;
        auto scores = fit();
        std::vector<std::uint8_t> preds(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i)
            preds[i] = scores[i] >= opt.threshold ? 1 : 0;
        return eval::metrics(eval::confusion(test.labels, preds)).f_score;
    };

    if (!search.forest_axes.empty()) {
        auto grid_cfgs = learn::enumerate_grid(search.forest_axes);
        std::size_t best = learn::random_search(
            grid_cfgs.size(), static_cast<std::size_t>(search.n_samples),
            derive_seed(cfg.seed, {0x5ea0ull}), [&](std::size_t idx) {
                learn::ForestParams p = params.forest;
                for (const auto& [key, value] : grid_cfgs[idx]) {
                    if (key == "n_trees") p.n_trees = static_cast<int>(value);
                    else if (key == "max_depth") p.max_depth = static_cast<int>(value);
                    else if (key == "min_leaf") p.min_leaf = static_cast<int>(value);
                    else if (key == "max_features") p.max_features = static_cast<int>(value);
                    else throw ConfigError("search.forest: unknown parameter '" + key + "'");
                }
                return validation_fscore(data.train, data.test, [&]() {
                    auto model = learn::fit_forest(learn::DataView::of(data.train),
                                                   data.train.labels, p,
                                                   derive_seed(cfg.seed, {0x5ea1ull, idx}));
                    return learn::predict_proba(model, learn::DataView::of(data.test));
                });
            });
        for (const auto& [key, value] : grid_cfgs[best]) {
            if (key == "n_trees") params.forest.n_trees = static_cast<int>(value);
            else if (key == "max_depth") params.forest.max_depth = static_cast<int>(value);
            else if (key == "min_leaf") params.forest.min_leaf = static_cast<int>(value);
            else if (key == "max_features") params.forest.max_features = static_cast<int>(value);
        }
        std::cerr << "[train] random search selected forest config #" << best << "\n";
    }
    if (!search.gbm_axes.empty()) {
        auto grid_cfgs = learn::enumerate_grid(search.gbm_axes);
        std::size_t best = learn::random_search(
            grid_cfgs.size(), static_cast<std::size_t>(search.n_samples),
            derive_seed(cfg.seed, {0x5ea2ull}), [&](std::size_t idx) {
                learn::BoostParams p = params.gbm;
                for (const auto& [key, value] : grid_cfgs[idx]) {
                    if (key == "n_rounds") p.n_rounds = static_cast<int>(value);
                    else if (key == "learning_rate") p.learning_rate = value;
                    else if (key == "max_depth") p.max_depth = static_cast<int>(value);
                    else if (key == "min_leaf") p.min_leaf = static_cast<int>(value);
                    else if (key == "subsample") p.subsample = value;
                    else throw ConfigError("search.gbm: unknown parameter '" + key + "'");
                }
                return validation_fscore(data.train, data.test, [&]() {
                    auto model = learn::fit_gbm(learn::DataView::of(data.train),
                                                data.train.labels, p,
                                                derive_seed(cfg.seed, {0x5ea3ull, idx}));
                    return learn::predict_proba(model, learn::DataView::of(data.test));
                });
            });
        for (const auto& [key, value] : grid_cfgs[best]) {
            if (key == "n_rounds") params.gbm.n_rounds = static_cast<int>(value);
            else if (key == "learning_rate") params.gbm.learning_rate = value;
            else if (key == "max_depth") params.gbm.max_depth = static_cast<int>(value);
            else if (key == "min_leaf") params.gbm.min_leaf = static_cast<int>(value);
            else if (key == "subsample") params.gbm.subsample = value;
        }
        std::cerr << "[train] random search selected gbm config #" << best << "\n";
    }
}

}  // namespace

void run_train_stage(const RunConfig& cfg) {
    read_stage_manifest(cfg, "dataset");
    auto city = load_city(cfg);
    auto grid = read_grid_csv(cfg.out_dir + "/dataset/grid.csv", city);
    auto folds = read_folds_json(cfg.out_dir + "/dataset/folds.json");

    eval::LearnerParams params = cfg.train.params;
    apply_random_search(cfg, city, grid, folds, params);

    eval::CvDriver driver(city, grid, folds, cv_options(cfg));
    eval::CvDriver::MatrixSelection selection;
    selection.models = cfg.train.models;
    selection.classifiers = cfg.train.classifiers;
    auto scores = driver.run_matrix_scores(params, selection, [](const std::string& what) {
        std::cerr << "[train] " << what << "\n";
    });

    std::string dir = cfg.out_dir + "/train";
    fs::create_directories(dir);
    json files = json::array();
    for (const auto& set : scores.sets) {
        std::string name = "scores_" + set.model + "_" + set.classifier + ".bin";
        write_scores_file(dir + "/" + name, set, scores.fold_ids);
        files.push_back(json{{"file", name}, {"model", set.model}, {"classifier", set.classifier}});
    }
    write_stage_manifest(cfg, "train", json{{"scores", std::move(files)}});
}

void run_eval_stage(const RunConfig& cfg) {
    read_stage_manifest(cfg, "dataset");
    json train_manifest = read_stage_manifest(cfg, "train");
    auto city = load_city(cfg);
    auto grid = read_grid_csv(cfg.out_dir + "/dataset/grid.csv", city);
    auto folds = read_folds_json(cfg.out_dir + "/dataset/folds.json");

    eval::CvDriver driver(city, grid, folds, cv_options(cfg));
    eval::CvDriver::MatrixScores scores;
    for (const auto& fold : folds) {
        auto data = driver.build_fold(fold);
        scores.test_labels.push_back(data.test.labels);
        scores.fold_ids.push_back(fold.fold_index);
    }
    for (const auto& entry : train_manifest.at("scores")) {
        std::string file = cfg.out_dir + "/train/" + entry.at("file").get<std::string>();
        std::vector<int> fold_ids;
        auto set = read_scores_file(file, fold_ids);
        set.model = entry.at("model").get<std::string>();
        set.classifier = entry.at("classifier").get<std::string>();
        if (fold_ids != scores.fold_ids)
            throw DataError(file + ": fold layout does not match the dataset artifacts");
        for (std::size_t i = 0; i < fold_ids.size(); ++i)
            if (set.fold_scores[i].size() != scores.test_labels[i].size())
                throw DataError(file + ": score count does not match the test split");
        scores.sets.push_back(std::move(set));
    }

    auto report = driver.report_from_scores(scores);
    std::string dir = cfg.out_dir + "/eval";
    fs::create_directories(dir);
    eval::write_eval_report_json(dir + "/eval_report.json", report);
    std::cerr << "[eval] rows=" << report.rows.size() << " folds=" << report.n_folds << "\n";
    write_stage_manifest(cfg, "eval", json{{"rows", report.rows.size()}});
}

void run_report_stage(const RunConfig& cfg) {
    read_stage_manifest(cfg, "eval");
    auto report = eval::read_eval_report_json(cfg.out_dir + "/eval/eval_report.json");
    std::string dir = cfg.out_dir + "/report";
    fs::create_directories(dir);
    eval::render_report(report, dir, cfg.report.formats);

    json manifest;
    manifest["seed"] = cfg.seed;
    manifest["paper_mode"] = cfg.paper_mode;
    manifest["threshold"] = cfg.eval_config.threshold;
    manifest["jobs"] = cfg.jobs;
    manifest["formats"] = cfg.report.formats;
    json hashes;
    for (const char* stage : {"synth", "features", "dataset", "train", "eval", "report"})
        hashes[stage] = config_hash_hex(config_slice(cfg, stage));
    manifest["config_hashes"] = std::move(hashes);
    std::ofstream out(dir + "/run_manifest.json", std::ios::binary);
    if (!out) throw DataError("cannot write run_manifest.json");
    out << manifest.dump(2) << '\n';
    write_stage_manifest(cfg, "report", json{{"formats", cfg.report.formats}});
}

void run_pipeline(const RunConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    if (cfg.has_synth) run_synth_stage(cfg);
    run_features_stage(cfg);
    run_dataset_stage(cfg);
    run_train_stage(cfg);
    run_eval_stage(cfg);
    run_report_stage(cfg);
    auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << "[pipeline] completed in " << static_cast<long>(seconds) << "s\n";
}

namespace {

int guard(const char* stage, const RunConfig& cfg, void (*fn)(const RunConfig&)) noexcept {
    try {
        fn(cfg);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << stage << ": config error: " << e.what() << "\n";
        return 2;
    } catch (const MissingArtifactError& e) {
        std::cerr << stage << ": missing artifact: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << stage << ": data error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << stage << ": internal error: " << e.what() << "\n";
        return 5;
    }
}

}  // namespace

int cmd_synth(const RunConfig& cfg) noexcept { return guard("synth", cfg, run_synth_stage); }
int cmd_features(const RunConfig& cfg) noexcept {
    return guard("features", cfg, run_features_stage);
}
int cmd_dataset(const RunConfig& cfg) noexcept { return guard("dataset", cfg, run_dataset_stage); }
int cmd_train(const RunConfig& cfg) noexcept { return guard("train", cfg, run_train_stage); }
int cmd_eval(const RunConfig& cfg) noexcept { return guard("eval", cfg, run_eval_stage); }
int cmd_report(const RunConfig& cfg) noexcept { return guard("report", cfg, run_report_stage); }
int cmd_pipeline(const RunConfig& cfg) noexcept { return guard("pipeline", cfg, run_pipeline); }

}  // namespace crimegrid
