#include "icsr/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace icsr {

std::vector<std::size_t> EmbeddingSet::cluster_members(int c) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == c) out.push_back(i);
    return out;
}

void RankingConfig::check() const {
    if (!(k0_fraction > 0.0)) throw std::invalid_argument("k0_fraction must be > 0");
    if (!(k0_fraction < kmax_fraction))
        throw std::invalid_argument("k0_fraction must be < kmax_fraction");
    if (!(kmax_fraction <= 1.0)) throw std::invalid_argument("kmax_fraction must be <= 1");
    if (k_step < 1) throw std::invalid_argument("k_step must be >= 1");
    if (num_groups < 1) throw std::invalid_argument("num_groups must be >= 1");
    if (p_fractions.size() != static_cast<std::size_t>(num_groups))
        throw std::invalid_argument("p_fractions must have num_groups entries");
    for (std::size_t j = 0; j < p_fractions.size(); ++j) {
        if (!(p_fractions[j] > 0.0) || !(p_fractions[j] <= 1.0))
            throw std::invalid_argument("p_fractions entries must be in (0, 1]");
        if (j > 0 && !(p_fractions[j] > p_fractions[j - 1]))
            throw std::invalid_argument("p_fractions must be strictly increasing");
    }
    if (p_increment_per_epoch_block < 0.0)
        throw std::invalid_argument("p_increment_per_epoch_block must be >= 0");
}

std::vector<Violation> validate(const EmbeddingSet& set) {
    std::vector<Violation> out;
    const std::size_t n = set.features.rows;

    if (set.assignments.size() != n)
        out.push_back({"assignments", "length " + std::to_string(set.assignments.size()) +
                                          " does not match sample count " + std::to_string(n)});
    if (!set.sample_ids.empty() && set.sample_ids.size() != n)
        out.push_back({"sample_ids", "length does not match sample count"});
    if (set.num_clusters < 1)
        out.push_back({"num_clusters", "must be >= 1"});

    for (std::size_t r = 0; r < set.features.rows; ++r)
        for (std::size_t c = 0; c < set.features.cols; ++c)
            if (!std::isfinite(set.features(r, c)))
                out.push_back({"features", "non-finite feature at (" + std::to_string(r) +
                                               ", " + std::to_string(c) + ")"});

    std::vector<bool> seen(std::max(set.num_clusters, 0), false);
    for (std::size_t i = 0; i < set.assignments.size() && i < n; ++i) {
        int a = set.assignments[i];
        if (a < 0 || a >= set.num_clusters)
            out.push_back({"assignments",
                           "out-of-range assignment at index " + std::to_string(i)});
        else
            seen[static_cast<std::size_t>(a)] = true;
    }
    for (std::size_t c = 0; c < seen.size(); ++c)
        if (!seen[c])
            out.push_back({"assignments", "cluster " + std::to_string(c) + " is empty"});

    if (!set.sample_ids.empty()) {
        std::unordered_set<std::int64_t> ids;
        for (std::size_t i = 0; i < set.sample_ids.size(); ++i)
            if (!ids.insert(set.sample_ids[i]).second)
                out.push_back({"sample_ids",
                               "duplicate sample id at index " + std::to_string(i)});
    }

    if (set.has_truth() && set.truth_labels.size() != n)
        out.push_back({"truth_labels", "length does not match sample count"});

    return out;
}

std::vector<int> resolve_k_sweep(const RankingConfig& cfg, std::size_t cluster_size) {
    if (cluster_size < 2)
        throw std::invalid_argument("degenerate cluster: size " +
                                    std::to_string(cluster_size) + " < 2");
    const auto nc = static_cast<double>(cluster_size);
    int k0 = std::max(1, static_cast<int>(std::floor(cfg.k0_fraction * nc)));
    int kmax = std::min(static_cast<int>(std::floor(cfg.kmax_fraction * nc)),
                        static_cast<int>(cluster_size) - 1);
    std::vector<int> ks;
    for (int k = k0; k <= kmax; k += cfg.k_step) ks.push_back(k);
    if (ks.empty())
        ks.push_back(std::min(k0, static_cast<int>(cluster_size) - 1));
    return ks;
}

std::vector<double> effective_p_fractions(const RankingConfig& cfg, int epoch) {
    const double inc = cfg.p_increment_per_epoch_block * (epoch / 50);
    std::vector<double> out(cfg.p_fractions.size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = std::min(1.0, cfg.p_fractions[j] + inc);
    return out;
}

std::vector<std::size_t> p_targets(const std::vector<double>& fractions,
                                   std::size_t cluster_size) {
    std::vector<std::size_t> out(fractions.size());
    std::size_t prev = 0;
    for (std::size_t j = 0; j < fractions.size(); ++j) {
        auto t = static_cast<std::size_t>(
            std::floor(fractions[j] * static_cast<double>(cluster_size) + 0.5));
        t = std::min(t, cluster_size);
        t = std::max(t, prev);
        out[j] = t;
        prev = t;
    }
    return out;
}

}  // namespace icsr
