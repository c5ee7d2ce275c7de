#pragma once
#include "icsr/core.hpp"

namespace icsr {

constexpr int kResidualGroup = 0;   // group_index for unranked samples

struct WeightedPseudoLabel {
    std::int64_t sample_id = 0;
    int pseudo_label = 0;       // the sample's current cluster assignment
    int group_index = kResidualGroup;   // 1..m, or kResidualGroup
    double weight = 0.0;
};

// w_i(t) = 1 - ((i - 1) / m)^((1 + t) * beta0); w_1 is always 1.
double group_weight(const WeightSchedule& schedule, int group_index, int epoch);

// One record per sample across all clusters' RankedGroups. Throws on a
// sample id appearing more than once.
std::vector<WeightedPseudoLabel> make_weighted_labels(
    const std::vector<RankedGroups>& groups, const WeightSchedule& schedule, int epoch);

}  // namespace icsr
