#include <cmath>

#include "crimegrid/errors.hpp"
#include "crimegrid/learn.hpp"
#include "crimegrid/parallel.hpp"
#include "crimegrid/rng.hpp"

#include "tree_detail.hpp"

namespace crimegrid::learn {

ForestModel fit_forest(DataView X, std::span<const std::uint8_t> y, const ForestParams& params,
                       std::uint64_t seed, int jobs) {
    if (X.n_rows == 0) throw DataError("fit_forest: no rows");
    if (y.size() != X.n_rows) throw DataError("fit_forest: label length mismatch");
    if (params.n_trees < 1) throw DataError("fit_forest: n_trees must be positive");

    CodedMatrix cm = CodedMatrix::build(X);
    std::vector<double> targets(X.n_rows);
    for (std::size_t i = 0; i < X.n_rows; ++i) targets[i] = static_cast<double>(y[i]);

    int max_features = params.max_features;
    if (max_features <= 0)
        max_features = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(X.n_cols))));
    max_features = std::min<int>(max_features, static_cast<int>(X.n_cols));

    ForestModel model;
    model.params = params;
    model.params.max_features = max_features;
    model.trees.resize(params.n_trees);

    TreeParams tp{params.max_depth, params.min_leaf};
    // Each tree owns a derived seed, so results are identical at any job count.
    parallel_for(static_cast<std::size_t>(params.n_trees), jobs, [&](std::size_t t) {
        Rng rng(derive_seed(seed, {0xf07e57ull, t}));
        std::vector<double> weights;
        std::vector<std::uint32_t> rows;
        rows.reserve(X.n_rows);
        if (params.bootstrap) {
            weights.assign(X.n_rows, 0.0);
            for (std::size_t i = 0; i < X.n_rows; ++i)
                weights[rng.uniform_index(X.n_rows)] += 1.0;
            for (std::uint32_t i = 0; i < X.n_rows; ++i)
                if (weights[i] > 0.0) rows.push_back(i);
        } else {
            for (std::uint32_t i = 0; i < X.n_rows; ++i) rows.push_back(i);
        }
        model.trees[t] = detail::fit_tree_coded(cm, rows, targets, weights, tp,
                                                SplitCriterion::gini, max_features, &rng);
    });
    return model;
}

std::vector<double> predict_proba(const ForestModel& model, DataView X) {
    std::vector<double> out(X.n_rows, 0.0);
    const double n_trees = static_cast<double>(model.trees.size());
    for (std::size_t i = 0; i < X.n_rows; ++i) {
        const double* row = X.row(i);
        int votes = 0;
        for (const auto& tree : model.trees)
            if (tree.predict(row) >= 0.5) ++votes;
        out[i] = static_cast<double>(votes) / n_trees;
    }
    return out;
}

}  // namespace crimegrid::learn
