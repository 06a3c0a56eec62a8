#pragma once

#include <string>

#include "crimegrid/config.hpp"
#include "crimegrid/dataset.hpp"
#include "crimegrid/eval.hpp"

namespace crimegrid {

// Stage bodies throw; the cmd_* wrappers map exceptions onto the CLI exit
// codes: 0 ok, 2 config, 3 missing artifact, 4 data validation, 5 internal.
void run_synth_stage(const RunConfig& cfg);
void run_features_stage(const RunConfig& cfg);
void run_dataset_stage(const RunConfig& cfg);
void run_train_stage(const RunConfig& cfg);
void run_eval_stage(const RunConfig& cfg);
void run_report_stage(const RunConfig& cfg);
void run_pipeline(const RunConfig& cfg);

int cmd_synth(const RunConfig& cfg) noexcept;
int cmd_features(const RunConfig& cfg) noexcept;
int cmd_dataset(const RunConfig& cfg) noexcept;
int cmd_train(const RunConfig& cfg) noexcept;
int cmd_eval(const RunConfig& cfg) noexcept;
int cmd_report(const RunConfig& cfg) noexcept;
int cmd_pipeline(const RunConfig& cfg) noexcept;

// Loads and joins the six input files. Throws MissingArtifactError when an
// input file does not exist.
features::CityData load_city(const RunConfig& cfg);

// dataset stage artifacts
void write_grid_csv(const std::string& path, const dataset::Grid& grid,
                    std::span<const std::string> region_ids);
dataset::Grid read_grid_csv(const std::string& path, const features::CityData& city);
void write_folds_json(const std::string& path, std::span<const dataset::FoldSpec> folds,
                      std::span<const int> years);
std::vector<dataset::FoldSpec> read_folds_json(const std::string& path);

// train stage artifact: one binary scores file per model/classifier pair
void write_scores_file(const std::string& path, const eval::CvDriver::ScoreSet& set,
                       std::span<const int> fold_ids);
eval::CvDriver::ScoreSet read_scores_file(const std::string& path,
                                          std::vector<int>& fold_ids);

}  // namespace crimegrid
