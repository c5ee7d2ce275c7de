#pragma once
#include "icsr/core.hpp"

namespace icsr {

// Within-cluster distance table: row s holds the N_c - 1 distances from
// member s to every other member, sorted ascending (ties broken by the
// other member's sample id before the id is dropped). Theta(N_c^2) memory.
struct DistanceMatrix {
    int cluster_id = 0;
    std::vector<std::int64_t> sample_ids;   // members, in cluster order
    Matrix values;                          // N_c x (N_c - 1), rows sorted
};

DistanceMatrix pairwise_distances(const EmbeddingSet& set, int cluster_id,
                                  DistanceMetric metric,
                                  bool normalize_features = false,
                                  int threads = 0);

// Noise score M per member: mean of the k smallest distances plus their
// median (even k: average of the two middle order statistics).
std::vector<double> noise_score(const DistanceMatrix& dm, int k);

// One score row per k from resolve_k_sweep, all over a single shared
// distance matrix.
NoiseScoreTable score_table(const EmbeddingSet& set, const RankingConfig& cfg,
                            int cluster_id, int threads = 0);

}  // namespace icsr
