#include "crimegrid/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "crimegrid/errors.hpp"

namespace crimegrid::eval {

Confusion confusion(std::span<const std::uint8_t> labels,
                    std::span<const std::uint8_t> predictions) {
    if (labels.empty()) throw DataError("confusion: empty input");
    if (labels.size() != predictions.size())
        throw DataError("confusion: labels and predictions differ in length");
    Confusion c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        bool truth = labels[i] != 0;
        bool pred = predictions[i] != 0;
        if (truth && pred) ++c.tp;
        else if (!truth && pred) ++c.fp;
        else if (!truth && !pred) ++c.tn;
        else ++c.fn;
    }
    return c;
}

Metrics metrics(const Confusion& c) {
    Metrics m;
    long long n = c.total();
    if (n <= 0) throw DataError("metrics: empty confusion matrix");
    m.accuracy = 100.0 * static_cast<double>(c.tp + c.tn) / static_cast<double>(n);
    m.precision = (c.tp + c.fp) > 0
                      ? 100.0 * static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp)
                      : 0.0;
    m.recall = (c.tp + c.fn) > 0
                   ? 100.0 * static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn)
                   : 0.0;
    m.f_score = (m.precision + m.recall) > 0.0
                    ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                    : 0.0;
    return m;
}

double f_score_macro(const Confusion& c) {
    Metrics pos = metrics(c);
    Confusion flipped{c.tn, c.fn, c.tp, c.fp};
    Metrics neg = metrics(flipped);
    return (pos.f_score + neg.f_score) / 2.0;
}

double auc(std::span<const std::uint8_t> labels, std::span<const double> scores) {
    if (labels.size() != scores.size()) throw DataError("auc: length mismatch");
    if (labels.empty()) throw DataError("auc: empty input");
    std::size_t n = labels.size();
    std::size_t n_pos = 0;
    for (std::uint8_t v : labels) n_pos += v != 0;
    std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DataError("auc: both classes must be present");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // average ranks over tie groups
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] != 0) rank_sum_pos += avg_rank;
        i = j;
    }
    double np = static_cast<double>(n_pos);
    double nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

}  // namespace crimegrid::eval
