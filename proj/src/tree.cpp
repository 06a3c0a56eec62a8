#include <algorithm>
#include <cmath>
#include <limits>

#include "crimegrid/errors.hpp"
#include "crimegrid/learn.hpp"

#include "tree_detail.hpp"

namespace crimegrid::learn {

CodedMatrix CodedMatrix::build(DataView X) {
    CodedMatrix cm;
    cm.n_rows = X.n_rows;
    cm.n_cols = X.n_cols;
    cm.codes.resize(X.n_rows * X.n_cols);
    cm.bin_values.resize(X.n_cols);
    std::vector<double> column(X.n_rows);
    for (std::size_t c = 0; c < X.n_cols; ++c) {
        for (std::size_t r = 0; r < X.n_rows; ++r) column[r] = X.row(r)[c];
        auto& values = cm.bin_values[c];
        values = column;
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t r = 0; r < X.n_rows; ++r) {
            auto it = std::lower_bound(values.begin(), values.end(), column[r]);
            cm.codes[r * X.n_cols + c] = static_cast<std::uint32_t>(it - values.begin());
        }
    }
    return cm;
}

double Tree::predict(const double* row) const {
    return nodes[static_cast<std::size_t>(leaf_index(row))].value;
}

std::int32_t Tree::leaf_index(const double* row) const {
    std::int32_t idx = 0;
    while (!nodes[idx].is_leaf()) {
        idx = row[nodes[idx].feature] <= nodes[idx].threshold ? nodes[idx].left
                                                              : nodes[idx].right;
    }
    return idx;
}

namespace detail {

// Shared CART builder. Targets are real-valued; for gini they must be 0/1.
// feature_rng, when set, restricts each split to max_features random columns.
struct TreeBuilder {
    const CodedMatrix& cm;
    std::span<const double> y;
    std::span<const double> w;  // aligned with row index, never reordered
    TreeParams params;
    SplitCriterion criterion;
    int max_features = 0;       // 0 = all
    Rng* feature_rng = nullptr;

    std::vector<std::uint32_t> rows;
    Tree tree;

    // per-column scratch histograms
    std::vector<double> hist_w, hist_wy, hist_wy2;

    struct Best {
        bool found = false;
        double score = std::numeric_limits<double>::infinity();  // minimized
        std::size_t feature = 0;
        std::uint32_t bin = 0;  // split sends code <= bin to the left
        double threshold = 0.0;
    };

    Tree build(std::span<const std::uint32_t> initial_rows) {
        rows.assign(initial_rows.begin(), initial_rows.end());
        std::size_t max_bins = 0;
        for (const auto& v : cm.bin_values) max_bins = std::max(max_bins, v.size());
        hist_w.resize(max_bins);
        hist_wy.resize(max_bins);
        hist_wy2.resize(max_bins);
        build_node(0, rows.size(), 0);
        return std::move(tree);
    }

    double weight_of(std::uint32_t row) const { return w.empty() ? 1.0 : w[row]; }

    std::int32_t build_node(std::size_t begin, std::size_t end, int depth) {
        double w_total = 0.0, wy_total = 0.0, wy2_total = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            double wi = weight_of(rows[i]);
            double yi = y[rows[i]];
            w_total += wi;
            wy_total += wi * yi;
            wy2_total += wi * yi * yi;
        }

        std::int32_t node_id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{});
        tree.nodes[node_id].value = w_total > 0.0 ? wy_total / w_total : 0.0;

        if (depth >= params.max_depth || w_total <= 0.0) return node_id;
        bool pure = criterion == SplitCriterion::gini
                        ? (wy_total <= 0.0 || wy_total >= w_total)
                        : (wy2_total - wy_total * wy_total / w_total <= 1e-12);
        if (pure) return node_id;

        Best best = find_best_split(begin, end, w_total, wy_total, wy2_total);
        if (!best.found) return node_id;

        std::size_t mid = static_cast<std::size_t>(
            std::stable_partition(rows.begin() + begin, rows.begin() + end,
                                  [&](std::uint32_t r) {
                                      return cm.code(r, best.feature) <= best.bin;
                                  }) -
            rows.begin());

        tree.nodes[node_id].feature = static_cast<std::int32_t>(best.feature);
        tree.nodes[node_id].threshold = best.threshold;
        std::int32_t left = build_node(begin, mid, depth + 1);
        tree.nodes[node_id].left = left;
        std::int32_t right = build_node(mid, end, depth + 1);
        tree.nodes[node_id].right = right;
        return node_id;
    }

    Best find_best_split(std::size_t begin, std::size_t end, double w_total, double wy_total,
                         double wy2_total) {
        Best best;
        std::vector<std::size_t> candidates;
        if (feature_rng != nullptr && max_features > 0 &&
            max_features < static_cast<int>(cm.n_cols)) {
            candidates = feature_rng->sample_without_replacement(cm.n_cols,
                                                                 static_cast<std::size_t>(max_features));
            std::sort(candidates.begin(), candidates.end());
        } else {
            candidates.resize(cm.n_cols);
            for (std::size_t c = 0; c < cm.n_cols; ++c) candidates[c] = c;
        }

        for (std::size_t f : candidates) {
            const auto& values = cm.bin_values[f];
            const std::size_t n_bins = values.size();
            if (n_bins < 2) continue;
            std::fill_n(hist_w.begin(), n_bins, 0.0);
            std::fill_n(hist_wy.begin(), n_bins, 0.0);
            if (criterion == SplitCriterion::variance)
                std::fill_n(hist_wy2.begin(), n_bins, 0.0);
            for (std::size_t i = begin; i < end; ++i) {
                std::uint32_t r = rows[i];
                std::uint32_t code = cm.code(r, f);
                double wi = weight_of(r);
                double yi = y[r];
                hist_w[code] += wi;
                hist_wy[code] += wi * yi;
                if (criterion == SplitCriterion::variance) hist_wy2[code] += wi * yi * yi;
            }

            double wl = 0.0, wyl = 0.0, wy2l = 0.0;
            for (std::size_t b = 0; b + 1 < n_bins; ++b) {
                if (hist_w[b] <= 0.0) continue;
                wl += hist_w[b];
                wyl += hist_wy[b];
                if (criterion == SplitCriterion::variance) wy2l += hist_wy2[b];
                double wr = w_total - wl;
                if (wr <= 0.0) break;  // b was the last occupied bin
                if (wl < params.min_leaf || wr < params.min_leaf) continue;
                double score;
                if (criterion == SplitCriterion::gini) {
                    double pl = wyl / wl;
                    double pr = (wy_total - wyl) / wr;
                    score = wl * pl * (1.0 - pl) + wr * pr * (1.0 - pr);
                } else {
                    double wyr = wy_total - wyl;
                    double wy2r = wy2_total - wy2l;
                    double sse_l = wy2l - wyl * wyl / wl;
                    double sse_r = wy2r - wyr * wyr / wr;
                    score = sse_l + sse_r;
                }
                if (score < best.score) {
                    std::size_t next = b + 1;  // wr > 0 guarantees a later occupied bin
                    while (hist_w[next] <= 0.0) ++next;
                    best.found = true;
                    best.score = score;
                    best.feature = f;
                    best.bin = static_cast<std::uint32_t>(b);
                    best.threshold = (values[b] + values[next]) / 2.0;
                }
            }
        }
        return best;
    }
};

Tree fit_tree_coded(const CodedMatrix& cm, std::span<const std::uint32_t> rows,
                    std::span<const double> y, std::span<const double> w,
                    const TreeParams& params, SplitCriterion criterion, int max_features,
                    Rng* feature_rng) {
    TreeBuilder builder{cm, y, w, params, criterion, max_features, feature_rng, {}, {}, {}, {}, {}};
    return builder.build(rows);
}

}  // namespace detail

Tree fit_tree(DataView X, std::span<const double> y, std::span<const double> weights,
              const TreeParams& params, SplitCriterion criterion) {
    if (X.n_rows == 0) throw DataError("fit_tree: no rows");
    if (y.size() != X.n_rows) throw DataError("fit_tree: target length mismatch");
    if (!weights.empty() && weights.size() != X.n_rows)
        throw DataError("fit_tree: weight length mismatch");
    CodedMatrix cm = CodedMatrix::build(X);
    std::vector<std::uint32_t> rows(X.n_rows);
    for (std::size_t i = 0; i < X.n_rows; ++i) rows[i] = static_cast<std::uint32_t>(i);
    return detail::fit_tree_coded(cm, rows, y, weights, params, criterion, 0, nullptr);
}

}  // namespace crimegrid::learn
