#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crimegrid/eval.hpp"
#include "crimegrid/synth.hpp"
#include "crimegrid/timeutil.hpp"

namespace crimegrid {

// One hierarchical config file drives every stage; all randomness flows from
// the single master seed. Unknown keys are rejected.
struct RunConfig {
    std::uint64_t seed = 42;
    int jobs = 1;
    bool paper_mode = false;
    std::string out_dir = "out";
    int timezone_offset_minutes = 0;

    bool has_synth = false;
    synth::CityConfig synth_config;

    struct Inputs {
        std::string regions;
        std::string crimes;
        std::string streetlights;
        std::string pois;
        std::string checkins;
        std::string demographics;
    } inputs;

    TimeBinning binning = TimeBinning::default_binning();

    features::FeatureOptions feature_options;

    struct DatasetConfig {
        std::vector<int> years;  // defaults to the synth years
        double undersample_ratio = 1.0;
        int n_folds = 10;
        bool export_matrices = false;
    } dataset;

    struct SearchConfig {
        bool enabled = false;
        int n_samples = 10;
        std::vector<std::pair<std::string, std::vector<double>>> forest_axes;
        std::vector<std::pair<std::string, std::vector<double>>> gbm_axes;
    };

    struct TrainConfig {
        std::vector<std::string> models;  // empty = all 12
        std::vector<eval::Classifier> classifiers = {
            eval::Classifier::forest, eval::Classifier::gbm, eval::Classifier::mlp_baseline};
        eval::LearnerParams params;
        SearchConfig search;
    } train;

    struct EvalConfig {
        double threshold = 0.5;
    } eval_config;

    struct ReportConfig {
        std::vector<std::string> formats = {"markdown", "csv"};
    } report;
};

RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

// Per-stage dependency slice of the resolved config; hashing these lets a
// downstream stage detect artifacts built under a different configuration.
nlohmann::json config_slice(const RunConfig& cfg, std::string_view stage);
std::string config_hash_hex(const nlohmann::json& slice);

}  // namespace crimegrid
