#pragma once

#include <span>

#include "crimegrid/learn.hpp"
#include "crimegrid/rng.hpp"

namespace crimegrid::learn::detail {

Tree fit_tree_coded(const CodedMatrix& cm, std::span<const std::uint32_t> rows,
                    std::span<const double> y, std::span<const double> w,
                    const TreeParams& params, SplitCriterion criterion, int max_features,
                    Rng* feature_rng);

}  // namespace crimegrid::learn::detail
