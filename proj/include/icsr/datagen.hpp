#pragma once
#include <cstdint>

#include "icsr/core.hpp"

namespace icsr {

// Gaussian-mixture benchmark: K isotropic blobs, each cluster holding a
// dominant fraction of its own class plus contaminants drawn from the other
// classes' distributions.
struct BenchmarkSpec {
    int num_classes = 5;            // K
    int per_cluster = 200;
    int dim = 16;
    double dominant_fraction = 0.7;
    double signal_std = 1.0;
    double noise_std = 1.0;
    // Center coordinates are drawn at this scale per dimension and rejected
    // until all pairwise distances exceed it; 0.9 with unit stds gives blobs
    // that overlap enough for label noise to matter while within-cluster
    // contaminants remain detectable by distance ranking.
    double center_separation = 0.9;
    std::uint64_t seed = 0;

    void check() const;
};

// Deterministic per seed. Assignments are the contaminated clusters,
// truth_labels the generating class. Sample order is shuffled so id order
// carries no ranking information. Throws if centers cannot be placed at the
// requested separation within a bounded number of attempts.
EmbeddingSet generate(const BenchmarkSpec& spec);

}  // namespace icsr
