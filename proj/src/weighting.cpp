#include "icsr/weighting.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace icsr {

double group_weight(const WeightSchedule& schedule, int group_index, int epoch) {
    if (group_index < 1 || group_index > schedule.num_groups)
        throw std::invalid_argument("group_index out of range");
    if (epoch < 0) throw std::invalid_argument("epoch must be >= 0");
    if (!(schedule.beta0 > 0.0)) throw std::invalid_argument("beta0 must be > 0");
    if (group_index == 1) return 1.0;
    const double base =
        static_cast<double>(group_index - 1) / static_cast<double>(schedule.num_groups);
    const double expo = (1.0 + static_cast<double>(epoch)) * schedule.beta0;
    return 1.0 - std::pow(base, expo);
}

std::vector<WeightedPseudoLabel> make_weighted_labels(
    const std::vector<RankedGroups>& groups, const WeightSchedule& schedule, int epoch) {
    std::vector<WeightedPseudoLabel> out;
    std::unordered_set<std::int64_t> seen;
    for (const auto& rg : groups) {
        for (std::size_t j = 0; j < rg.groups.size(); ++j) {
            const double w = group_weight(schedule, static_cast<int>(j) + 1, epoch);
            for (auto id : rg.groups[j]) {
                if (!seen.insert(id).second)
                    throw std::invalid_argument("duplicate sample id " +
                                                std::to_string(id) + " across groups");
                out.push_back({id, rg.cluster_id, static_cast<int>(j) + 1, w});
            }
        }
        for (auto id : rg.residual) {
            if (!seen.insert(id).second)
                throw std::invalid_argument("duplicate sample id " + std::to_string(id) +
                                            " across groups");
            out.push_back({id, rg.cluster_id, kResidualGroup, schedule.residual_weight});
        }
    }
    return out;
}

}  // namespace icsr
