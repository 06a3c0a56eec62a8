#pragma once

#include <cstdint>
#include <span>

namespace crimegrid::eval {

struct Confusion {
    long long tp = 0;
    long long fp = 0;
    long long tn = 0;
    long long fn = 0;

    long long total() const { return tp + fp + tn + fn; }
};

// Positive class = crime. Errors on empty or mismatched inputs.
Confusion confusion(std::span<const std::uint8_t> labels, std::span<const std::uint8_t> predictions);

struct Metrics {
    double accuracy = 0.0;   // percent
    double precision = 0.0;  // percent
    double recall = 0.0;     // percent
    double f_score = 0.0;    // percent; every 0/0 is defined as 0
};

Metrics metrics(const Confusion& c);

// Macro F: mean of the positive- and negative-class F-scores, in percent.
double f_score_macro(const Confusion& c);

// Rank-based (Mann-Whitney) AUC with ties counted one half; equals the
// trapezoidal ROC area. Errors when only one class is present.
double auc(std::span<const std::uint8_t> labels, std::span<const double> scores);

}  // namespace crimegrid::eval
