#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crimegrid/dataset.hpp"
#include "crimegrid/learn.hpp"
#include "crimegrid/metrics.hpp"

namespace crimegrid::eval {

enum class Classifier { forest, gbm, mlp_baseline };
std::string_view classifier_name(Classifier c);
Classifier classifier_from_name(std::string_view name);

struct ModelSpec {
    std::string name;        // MR, MD, ... MA
    dataset::GroupSet mask;  // R always present
};

// The 12 feature-combination models, in report order.
const std::vector<ModelSpec>& model_matrix();
const ModelSpec& model_by_name(std::string_view name);

struct LearnerParams {
    learn::ForestParams forest;
    learn::BoostParams gbm;
    learn::MlpParams mlp;
};

struct FoldMetrics {
    int fold = 0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    double f_score_macro = 0.0;
    double auc = 0.0;
};

struct ReportRow {
    std::string model;
    std::string classifier;
    std::vector<FoldMetrics> folds;
    FoldMetrics mean;  // fold = -1

    void compute_mean();
};

struct EvalReport {
    std::vector<ReportRow> rows;
    int n_folds = 0;
    std::uint64_t seed = 0;
    bool paper_mode = false;
    double threshold = 0.5;

    const ReportRow* find(std::string_view model, std::string_view classifier) const;
};

void write_eval_report_json(const std::string& path, const EvalReport& report);
EvalReport read_eval_report_json(const std::string& path);

struct CvOptions {
    double undersample_ratio = 1.0;
    bool paper_mode = false;
    double threshold = 0.5;
    int jobs = 1;
    std::uint64_t seed = 0;
    features::FeatureOptions feature_options;
};

// Drives the time-constrained CV: per fold the window-dependent features are
// recomputed from the train window (or once over everything in paper_mode),
// the train split is under-sampled, and the fitted model scores the full
// test window.
class CvDriver {
public:
    CvDriver(const features::CityData& city, const dataset::Grid& grid,
             std::vector<dataset::FoldSpec> folds, const CvOptions& options);

    struct FoldData {
        dataset::FeatureMatrix train;  // full feature mask
        dataset::FeatureMatrix test;
        std::vector<std::uint32_t> train_cells;
        std::vector<std::uint32_t> test_cells;
    };

    FoldData build_fold(const dataset::FoldSpec& fold) const;

    using FitPredict = std::function<std::vector<double>(
        const dataset::FeatureMatrix& train, const dataset::FeatureMatrix& test,
        std::uint64_t seed)>;

    ReportRow run_cv(const ModelSpec& spec, Classifier clf, const LearnerParams& params) const;
    ReportRow run_cv_custom(const ModelSpec& spec, const std::string& clf_name,
                            const FitPredict& fit_predict) const;

    struct MatrixSelection {
        std::vector<std::string> models;      // empty = all 12
        std::vector<Classifier> classifiers;  // mlp_baseline applies to MA only
    };

    struct ScoreSet {
        std::string model;
        std::string classifier;
        std::vector<std::vector<float>> fold_scores;  // [fold][test row]
    };

    struct MatrixScores {
        std::vector<ScoreSet> sets;
        std::vector<std::vector<std::uint8_t>> test_labels;  // [fold]
        std::vector<int> fold_ids;
    };

    // fold-major evaluation: each fold's matrices are built once and shared
    // by every selected model/classifier; scores are kept in float like the
    // on-disk artifact so both paths report identical metrics.
    MatrixScores run_matrix_scores(
        const LearnerParams& params, const MatrixSelection& selection,
        const std::function<void(const std::string&)>& progress = nullptr) const;

    EvalReport report_from_scores(const MatrixScores& scores) const;

    // All 12 specs for forest and gbm plus the MLP baseline on MA: 25 rows.
    EvalReport run_matrix(const LearnerParams& params,
                          const std::function<void(const std::string&)>& progress = nullptr) const;

    const std::vector<dataset::FoldSpec>& folds() const { return folds_; }
    const CvOptions& options() const { return options_; }

    static FitPredict make_fit_predict(Classifier clf, const LearnerParams& params);

    FoldMetrics score_fold(int fold, std::span<const float> scores,
                           std::span<const std::uint8_t> labels) const;
    FoldMetrics score_fold(int fold, std::span<const double> scores,
                           std::span<const std::uint8_t> labels) const;

private:

    const features::CityData& city_;
    const dataset::Grid& grid_;
    std::vector<dataset::FoldSpec> folds_;
    CvOptions options_;
    MonthWindow full_window_{};
    std::optional<features::RegionFeatureTable> paper_features_;
    std::vector<std::uint32_t> paper_retained_;  // global under-sample, paper_mode only
};

// Report rendering: Table 3 and Table 4 shaped files plus a provenance
// manifest. Formats: "markdown", "csv".
void render_report(const EvalReport& report, const std::string& out_dir,
                   const std::vector<std::string>& formats);

}  // namespace crimegrid::eval
