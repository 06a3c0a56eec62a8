#include <algorithm>
#include <cmath>

#include "crimegrid/errors.hpp"
#include "crimegrid/learn.hpp"
#include "crimegrid/rng.hpp"

#include "tree_detail.hpp"

namespace crimegrid::learn {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double mean_logloss(std::span<const double> margins, std::span<const std::uint8_t> y) {
    double loss = 0.0;
    for (std::size_t i = 0; i < margins.size(); ++i) {
        double p = std::clamp(sigmoid(margins[i]), 1e-15, 1.0 - 1e-15);
        loss -= y[i] ? std::log(p) : std::log(1.0 - p);
    }
    return loss / static_cast<double>(margins.size());
}

}  // namespace

BoostModel fit_gbm(DataView X, std::span<const std::uint8_t> y, const BoostParams& params,
                   std::uint64_t seed, std::vector<double>* train_logloss_trace) {
    if (X.n_rows == 0) throw DataError("fit_gbm: no rows");
    if (y.size() != X.n_rows) throw DataError("fit_gbm: label length mismatch");
    std::size_t positives = 0;
    for (std::uint8_t v : y) positives += v;
    if (positives == 0 || positives == y.size())
        throw DataError("fit_gbm: single-class targets, base log-odds undefined");

    BoostModel model;
    model.params = params;
    double base_rate = static_cast<double>(positives) / static_cast<double>(y.size());
    model.base_score = std::log(base_rate / (1.0 - base_rate));
    model.rounds.reserve(params.n_rounds);

    CodedMatrix cm = CodedMatrix::build(X);
    std::vector<double> margins(X.n_rows, model.base_score);
    std::vector<double> residuals(X.n_rows);
    if (train_logloss_trace) {
        train_logloss_trace->clear();
        train_logloss_trace->push_back(mean_logloss(margins, y));
    }

    TreeParams tp{params.max_depth, params.min_leaf};
    std::size_t sample_size = static_cast<std::size_t>(
        params.subsample * static_cast<double>(X.n_rows));
    sample_size = std::clamp<std::size_t>(sample_size, 1, X.n_rows);

    std::vector<std::uint32_t> all_rows(X.n_rows);
    for (std::size_t i = 0; i < X.n_rows; ++i) all_rows[i] = static_cast<std::uint32_t>(i);

    for (int round = 0; round < params.n_rounds; ++round) {
        for (std::size_t i = 0; i < X.n_rows; ++i)
            residuals[i] = static_cast<double>(y[i]) - sigmoid(margins[i]);

        std::vector<std::uint32_t> rows;
        if (sample_size < X.n_rows) {
            Rng rng(derive_seed(seed, {0xb005ull, static_cast<std::uint64_t>(round)}));
            auto picks = rng.sample_without_replacement(X.n_rows, sample_size);
            std::sort(picks.begin(), picks.end());
            rows.assign(picks.begin(), picks.end());
        } else {
            rows = all_rows;
        }

        Tree tree = detail::fit_tree_coded(cm, rows, residuals, {}, tp,
                                           SplitCriterion::variance, 0, nullptr);

        // One Newton step per leaf: sum(y - p) / sum(p (1 - p)) over the
        // round's sample.
        std::vector<double> num(tree.nodes.size(), 0.0);
        std::vector<double> den(tree.nodes.size(), 0.0);
        for (std::uint32_t r : rows) {
            double p = sigmoid(margins[r]);
            std::int32_t leaf = tree.leaf_index(X.row(r));
            num[leaf] += static_cast<double>(y[r]) - p;
            den[leaf] += p * (1.0 - p);
        }
        for (std::size_t idx = 0; idx < tree.nodes.size(); ++idx) {
            if (!tree.nodes[idx].is_leaf()) continue;
            tree.nodes[idx].value = den[idx] > 1e-12 ? num[idx] / den[idx] : 0.0;
        }

        for (std::size_t i = 0; i < X.n_rows; ++i)
            margins[i] += params.learning_rate * tree.predict(X.row(i));
        model.rounds.push_back(BoostRound{std::move(tree), params.learning_rate});
        if (train_logloss_trace) train_logloss_trace->push_back(mean_logloss(margins, y));
    }
    return model;
}

std::vector<double> predict_proba(const BoostModel& model, DataView X) {
    std::vector<double> out(X.n_rows);
    for (std::size_t i = 0; i < X.n_rows; ++i) {
        const double* row = X.row(i);
        double margin = model.base_score;
        for (const auto& round : model.rounds)
            margin += round.learning_rate * round.tree.predict(row);
        out[i] = sigmoid(margin);
    }
    return out;
}

}  // namespace crimegrid::learn
