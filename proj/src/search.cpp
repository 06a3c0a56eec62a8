#include "crimegrid/errors.hpp"
#include "crimegrid/learn.hpp"
#include "crimegrid/rng.hpp"

namespace crimegrid::learn {

std::size_t random_search(std::size_t n_candidates, std::size_t n_samples, std::uint64_t seed,
                          const std::function<double(std::size_t)>& validation_fscore) {
    if (n_candidates == 0) throw DataError("random_search: empty candidate grid");
    Rng rng(derive_seed(seed, {0x5ea12c4ull}));
    auto picks = rng.sample_without_replacement(n_candidates, std::max<std::size_t>(1, n_samples));

    std::size_t best_idx = picks[0];
    double best_score = validation_fscore(picks[0]);
    for (std::size_t i = 1; i < picks.size(); ++i) {
        double score = validation_fscore(picks[i]);
        if (score > best_score) {
            best_score = score;
            best_idx = picks[i];
        }
    }
    return best_idx;
}

std::vector<ParamMap> enumerate_grid(
    const std::vector<std::pair<std::string, std::vector<double>>>& axes) {
    std::vector<ParamMap> configs = {ParamMap{}};
    for (const auto& [name, values] : axes) {
        if (values.empty()) throw DataError("enumerate_grid: axis '" + name + "' has no values");
        std::vector<ParamMap> expanded;
        expanded.reserve(configs.size() * values.size());
        for (const auto& base : configs) {
            for (double v : values) {
                ParamMap next = base;
                next[name] = v;
                expanded.push_back(std::move(next));
            }
        }
        configs = std::move(expanded);
    }
    return configs;
}

}  // namespace crimegrid::learn
