#include "icsr/ranking.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "icsr/parallel.hpp"
#include "icsr/scoring.hpp"

namespace icsr {

SortedLists sort_by_score(const NoiseScoreTable& table) {
    SortedLists out;
    out.cluster_id = table.cluster_id;
    const std::size_t nc = table.sample_ids.size();
    out.lists.resize(table.k_values.size());
    for (std::size_t a = 0; a < table.k_values.size(); ++a) {
        std::vector<std::size_t> order(nc);
        std::iota(order.begin(), order.end(), 0);
        const double* row = table.scores.row(a);
        const auto& ids = table.sample_ids;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) {
                             if (row[x] != row[y]) return row[x] < row[y];
                             return ids[x] < ids[y];
                         });
        out.lists[a].resize(nc);
        for (std::size_t i = 0; i < nc; ++i) out.lists[a][i] = ids[order[i]];
    }
    return out;
}

RankedGroups vote_groups(const SortedLists& lists,
                         const std::vector<std::size_t>& p_targets) {
    if (lists.lists.empty()) throw std::invalid_argument("vote_groups: no sorted lists");
    const std::size_t n_lists = lists.lists.size();
    const std::size_t nc = lists.lists[0].size();
    for (const auto& l : lists.lists)
        if (l.size() != nc)
            throw std::invalid_argument("vote_groups: lists have unequal length");

    // Local index per id; ids listed in ascending order for deterministic keys.
    std::vector<std::int64_t> ids = lists.lists[0];
    std::sort(ids.begin(), ids.end());
    std::unordered_map<std::int64_t, std::size_t> index;
    index.reserve(nc);
    for (std::size_t i = 0; i < nc; ++i) index[ids[i]] = i;

    // positions[l][local] = rank of the sample in list l
    std::vector<std::vector<std::size_t>> positions(n_lists,
                                                    std::vector<std::size_t>(nc));
    for (std::size_t l = 0; l < n_lists; ++l)
        for (std::size_t r = 0; r < nc; ++r) positions[l][index.at(lists.lists[l][r])] = r;

    std::vector<double> mean_rank(nc, 0.0);
    for (std::size_t i = 0; i < nc; ++i) {
        double s = 0.0;
        for (std::size_t l = 0; l < n_lists; ++l) s += static_cast<double>(positions[l][i]);
        mean_rank[i] = s / static_cast<double>(n_lists);
    }

    RankedGroups out;
    out.cluster_id = lists.cluster_id;
    out.groups.resize(p_targets.size());

    std::vector<bool> selected(nc, false);
    std::size_t n_selected = 0;

    std::vector<std::size_t> count(nc);
    std::vector<std::size_t> candidates;
    for (std::size_t j = 0; j < p_targets.size(); ++j) {
        const std::size_t target = std::min(p_targets[j], nc);
        if (target <= n_selected) continue;   // empty group

        count.assign(nc, 0);
        for (std::size_t l = 0; l < n_lists; ++l) {
            const std::size_t window = std::min(target, nc);
            for (std::size_t r = 0; r < window; ++r)
                ++count[index.at(lists.lists[l][r])];
        }

        // Earlier rounds' selections stay selected: windows are nested so a
        // previously chosen sample can never leave the cumulative set.
        candidates.clear();
        for (std::size_t i = 0; i < nc; ++i)
            if (!selected[i]) candidates.push_back(i);
        auto key_less = [&](std::size_t x, std::size_t y) {
            if (count[x] != count[y]) return count[x] > count[y];
            if (mean_rank[x] != mean_rank[y]) return mean_rank[x] < mean_rank[y];
            return ids[x] < ids[y];
        };
        const std::size_t take = target - n_selected;
        std::partial_sort(candidates.begin(),
                          candidates.begin() + static_cast<std::ptrdiff_t>(
                                                   std::min(take, candidates.size())),
                          candidates.end(), key_less);

        auto& group = out.groups[j];
        for (std::size_t i = 0; i < take && i < candidates.size(); ++i) {
            group.push_back(ids[candidates[i]]);
            selected[candidates[i]] = true;
            ++n_selected;
        }
    }

    for (std::size_t i = 0; i < nc; ++i)
        if (!selected[i]) out.residual.push_back(ids[i]);
    return out;
}

std::vector<RankedGroups> rank_all(const EmbeddingSet& set, const RankingConfig& cfg,
                                   int epoch, int threads) {
    cfg.check();
    const auto fractions = effective_p_fractions(cfg, epoch);

    std::vector<int> cluster_ids;
    for (int c = 0; c < set.num_clusters; ++c)
        if (!set.cluster_members(c).empty()) cluster_ids.push_back(c);

    std::vector<RankedGroups> out(cluster_ids.size());
    parallel_for(cluster_ids.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t ci = begin; ci < end; ++ci) {
            const int c = cluster_ids[ci];
            const auto members = set.cluster_members(c);
            if (members.size() < 2) {
                RankedGroups g;
                g.cluster_id = c;
                g.groups.resize(cfg.num_groups);
                for (auto m : members) g.groups[0].push_back(set.sample_ids[m]);
                out[ci] = std::move(g);
                continue;
            }
            // Distance rows within the cluster run single-threaded here;
            // clusters are already spread across threads.
            const auto table = score_table(set, cfg, c, 1);
            const auto lists = sort_by_score(table);
            out[ci] = vote_groups(lists, p_targets(fractions, members.size()));
        }
    });
    return out;
}

}  // namespace icsr
