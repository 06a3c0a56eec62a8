#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "crimegrid/dataset.hpp"

namespace crimegrid::learn {

struct DataView {
    const double* values = nullptr;
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;

    const double* row(std::size_t i) const { return values + i * n_cols; }
    static DataView of(const dataset::FeatureMatrix& m) {
        return DataView{m.values.data(), m.n_rows, m.n_cols()};
    }
};

// Per-column integer codes over the sorted unique values, so node histograms
// replace per-node sorting. Split thresholds remain the exact CART midpoints
// between consecutive unique values present in a node.
struct CodedMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::uint32_t> codes;               // row-major
    std::vector<std::vector<double>> bin_values;    // per column, ascending

    static CodedMatrix build(DataView X);
    std::uint32_t code(std::size_t row, std::size_t col) const {
        return codes[row * n_cols + col];
    }
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 = leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict(const double* row) const;
    std::int32_t leaf_index(const double* row) const;
};

enum class SplitCriterion { gini, variance };

struct TreeParams {
    int max_depth = 20;
    int min_leaf = 1;
};

// Greedy CART on the full feature set. Weights may be empty (all ones).
Tree fit_tree(DataView X, std::span<const double> y, std::span<const double> weights,
              const TreeParams& params, SplitCriterion criterion);

struct ForestParams {
    int n_trees = 200;
    int max_depth = 20;
    int min_leaf = 1;
    int max_features = 0;  // 0 = ceil(sqrt(d))
    bool bootstrap = true;
};

struct ForestModel {
    ForestParams params;
    std::vector<Tree> trees;
};

ForestModel fit_forest(DataView X, std::span<const std::uint8_t> y, const ForestParams& params,
                       std::uint64_t seed, int jobs = 1);
// Fraction of per-tree class votes; always a multiple of 1/n_trees.
std::vector<double> predict_proba(const ForestModel& model, DataView X);

struct BoostParams {
    int n_rounds = 200;
    double learning_rate = 0.1;
    int max_depth = 3;
    int min_leaf = 1;
    double subsample = 1.0;
};

struct BoostRound {
    Tree tree;  // leaf values are unscaled Newton steps
    double learning_rate;
};

struct BoostModel {
    BoostParams params;
    double base_score = 0.0;  // log-odds of the base rate
    std::vector<BoostRound> rounds;
};

// Logistic-loss gradient boosting; each round fits a regression tree to the
// residuals y - p and assigns leaves one Newton step. Errors on single-class y.
BoostModel fit_gbm(DataView X, std::span<const std::uint8_t> y, const BoostParams& params,
                   std::uint64_t seed, std::vector<double>* train_logloss_trace = nullptr);
std::vector<double> predict_proba(const BoostModel& model, DataView X);

struct MlpParams {
    int encoder_width = 32;
    int joint1 = 64;
    int joint2 = 32;
    double learning_rate = 0.01;
    double momentum = 0.9;
    int batch_size = 256;
    int epochs = 300;
};

struct GroupSpec {
    char tag = 'R';
    std::vector<std::uint32_t> cols;
};

// Feature-level fusion: one sigmoid encoder per feature group, concatenated
// into two sigmoid joint layers and a sigmoid output.
class MlpModel {
public:
    MlpModel() = default;
    MlpModel(std::vector<GroupSpec> groups, std::size_t n_cols, const MlpParams& params,
             std::uint64_t seed);

    std::vector<double>& parameters() { return theta_; }
    const std::vector<double>& parameters() const { return theta_; }
    void set_standardization(std::vector<double> mean, std::vector<double> sd);

    double predict(const double* row) const;
    std::vector<double> predict_proba(DataView X) const;

    // Mean binary cross-entropy and its gradient for a batch; the gradient
    // vector is aligned with parameters().
    double loss_and_grad(DataView X, std::span<const std::uint8_t> y,
                         std::vector<double>* grad) const;

    void sgd_epoch(DataView X, std::span<const std::uint8_t> y, std::uint64_t epoch_seed,
                   std::vector<double>& velocity);

    struct LayerSpan {
        std::string name;
        std::size_t offset;
        std::size_t size;
    };
    std::vector<LayerSpan> layer_spans() const;

    const MlpParams& params() const { return params_; }
    const std::vector<GroupSpec>& groups() const { return groups_; }
    std::size_t n_cols() const { return n_cols_; }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& sd() const { return sd_; }

private:
    friend void mlp_from_json_parts(MlpModel&, std::vector<GroupSpec>, std::size_t, MlpParams,
                                    std::vector<double>, std::vector<double>,
                                    std::vector<double>);
    void forward(const double* row, std::vector<double>& scratch) const;

    MlpParams params_;
    std::vector<GroupSpec> groups_;
    std::size_t n_cols_ = 0;
    std::vector<double> mean_, sd_;
    std::vector<double> theta_;
    std::size_t concat_size_ = 0;
    std::size_t scratch_size_ = 0;
    std::vector<std::size_t> enc_w_off_, enc_b_off_;
    std::size_t w1_off_ = 0, b1_off_ = 0, w2_off_ = 0, b2_off_ = 0, w3_off_ = 0, b3_off_ = 0;
};

void mlp_from_json_parts(MlpModel& model, std::vector<GroupSpec> groups, std::size_t n_cols,
                         MlpParams params, std::vector<double> mean, std::vector<double> sd,
                         std::vector<double> theta);

struct EpochMetrics {
    int epoch = 0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    double auc = 0.0;
};

struct MlpFitResult {
    MlpModel model;  // weights of the best epoch
    std::vector<EpochMetrics> trace;
    int best_epoch = -1;  // -1 when epochs == 0
};

// Trains with per-epoch test evaluation and keeps the best-epoch weights,
// replicating the baseline's protocol. Groups come from the matrix tags.
MlpFitResult fit_mlp(const dataset::FeatureMatrix& train, const MlpParams& params,
                     std::uint64_t seed, const dataset::FeatureMatrix& test);

// Uniform sampling without replacement over a candidate list; picks the
// candidate maximizing the validation F-score (ties break to the earliest
// sampled). Errors on an empty candidate list.
std::size_t random_search(std::size_t n_candidates, std::size_t n_samples, std::uint64_t seed,
                          const std::function<double(std::size_t)>& validation_fscore);

// Cartesian expansion of named axes into flat configurations.
using ParamMap = std::map<std::string, double>;
std::vector<ParamMap> enumerate_grid(
    const std::vector<std::pair<std::string, std::vector<double>>>& axes);

// Versioned JSON serialization; doubles round-trip bit-exactly.
void save_forest(const std::string& path, const ForestModel& model);
ForestModel load_forest(const std::string& path);
void save_gbm(const std::string& path, const BoostModel& model);
BoostModel load_gbm(const std::string& path);
void save_mlp(const std::string& path, const MlpModel& model);
MlpModel load_mlp(const std::string& path);

}  // namespace crimegrid::learn
