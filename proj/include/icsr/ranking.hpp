#pragma once
#include "icsr/core.hpp"

namespace icsr {

// One list per k: the cluster's sample ids sorted by ascending noise score.
struct SortedLists {
    int cluster_id = 0;
    std::vector<std::vector<std::int64_t>> lists;
};

// Sort each score row ascending; ties broken by ascending sample id.
SortedLists sort_by_score(const NoiseScoreTable& table);

// Robust majority voting over the sorted lists. p_targets are cumulative
// selection sizes (non-decreasing, each <= N_c). For each round j, samples
// are tallied by how many lists place them in the top-p_j window and the
// selection is grown to exactly p_j by (count desc, mean rank asc, id asc);
// g_j is the newly selected set in that key order. Samples never selected
// form the residual.
RankedGroups vote_groups(const SortedLists& lists,
                         const std::vector<std::size_t>& p_targets);

// Full pipeline for every cluster: score_table -> sort_by_score ->
// vote_groups with targets from the epoch-adjusted p fractions. Clusters of
// size 1 become a single group; empty clusters are skipped.
std::vector<RankedGroups> rank_all(const EmbeddingSet& set, const RankingConfig& cfg,
                                   int epoch, int threads = 0);

}  // namespace icsr
