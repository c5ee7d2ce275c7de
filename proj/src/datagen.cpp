#include "icsr/datagen.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "icsr/rng.hpp"

namespace icsr {

void BenchmarkSpec::check() const {
    if (num_classes < 2) throw std::invalid_argument("num_classes must be >= 2");
    if (per_cluster < 1) throw std::invalid_argument("per_cluster must be >= 1");
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (!(dominant_fraction > 1.0 / num_classes) || dominant_fraction > 1.0)
        throw std::invalid_argument("dominant_fraction must be in (1/K, 1]");
    if (dominant_fraction * per_cluster < 1.0)
        throw std::invalid_argument("dominant_fraction * per_cluster must be >= 1");
    if (!(signal_std > 0.0) || !(noise_std > 0.0))
        throw std::invalid_argument("std parameters must be > 0");
    if (!(center_separation > 0.0))
        throw std::invalid_argument("center_separation must be > 0");
}

EmbeddingSet generate(const BenchmarkSpec& spec) {
    spec.check();
    Rng rng(spec.seed);
    const int k = spec.num_classes;
    const int d = spec.dim;

    // Centers drawn isotropically at a scale tied to the separation,
    // rejection-checked for pairwise distance.
    Matrix centers(k, d);
    const double scale = spec.center_separation;
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
        for (int c = 0; c < k; ++c)
            for (int j = 0; j < d; ++j) centers(c, j) = scale * rng.gaussian();
        placed = true;
        for (int a = 0; a < k && placed; ++a)
            for (int b = a + 1; b < k && placed; ++b) {
                double s = 0.0;
                for (int j = 0; j < d; ++j) {
                    const double diff = centers(a, j) - centers(b, j);
                    s += diff * diff;
                }
                if (std::sqrt(s) < spec.center_separation) placed = false;
            }
    }
    if (!placed)
        throw std::runtime_error(
            "could not place class centers at the requested separation");

    const int n_signal = static_cast<int>(
        std::floor(spec.dominant_fraction * spec.per_cluster + 0.5));
    const int n_noise = spec.per_cluster - n_signal;
    const std::size_t total = static_cast<std::size_t>(k) * spec.per_cluster;

    EmbeddingSet set;
    set.features = Matrix(total, d);
    set.assignments.resize(total);
    set.truth_labels.resize(total);
    set.num_clusters = k;

    std::size_t row = 0;
    for (int c = 0; c < k; ++c) {
        for (int i = 0; i < n_signal; ++i, ++row) {
            for (int j = 0; j < d; ++j)
                set.features(row, j) = centers(c, j) + spec.signal_std * rng.gaussian();
            set.assignments[row] = c;
            set.truth_labels[row] = c;
        }
        // contaminants cycle round-robin over the other classes
        int other = (c + 1) % k;
        for (int i = 0; i < n_noise; ++i, ++row) {
            for (int j = 0; j < d; ++j)
                set.features(row, j) =
                    centers(other, j) + spec.noise_std * rng.gaussian();
            set.assignments[row] = c;
            set.truth_labels[row] = other;
            other = (other + 1) % k;
            if (other == c) other = (other + 1) % k;
        }
    }

    // Fisher-Yates shuffle of sample order so within-cluster id order is
    // uninformative; ids are assigned after shuffling.
    std::vector<std::size_t> perm(total);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = total - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(perm[i], perm[j]);
    }
    EmbeddingSet out;
    out.features = Matrix(total, d);
    out.assignments.resize(total);
    out.truth_labels.resize(total);
    out.num_clusters = k;
    out.sample_ids.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        const std::size_t src = perm[i];
        std::copy(set.features.row(src), set.features.row(src) + d, out.features.row(i));
        out.assignments[i] = set.assignments[src];
        out.truth_labels[i] = set.truth_labels[src];
        out.sample_ids[i] = static_cast<std::int64_t>(i);
    }
    return out;
}

}  // namespace icsr
