#include "icsr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace icsr {
namespace {

int max_label(const std::vector<int>& v) {
    int m = -1;
    for (int x : v) {
        if (x < 0) throw std::invalid_argument("negative label");
        m = std::max(m, x);
    }
    return m;
}

double binom2(std::int64_t n) { return 0.5 * static_cast<double>(n) * (n - 1); }

bool same_partition(const ContingencyTable& t) {
    // identical up to relabeling: every row and column has one nonzero entry
    for (const auto& row : t.counts) {
        int nz = 0;
        for (auto v : row) nz += v > 0;
        if (nz > 1) return false;
    }
    std::vector<int> col_nz(t.true_marginals.size(), 0);
    for (const auto& row : t.counts)
        for (std::size_t j = 0; j < row.size(); ++j) col_nz[j] += row[j] > 0;
    for (int nz : col_nz)
        if (nz > 1) return false;
    return true;
}

}  // namespace

ContingencyTable contingency(const std::vector<int>& pred,
                             const std::vector<int>& truth) {
    if (pred.empty() || pred.size() != truth.size())
        throw std::invalid_argument("label vectors must be non-empty and equal length");
    const std::size_t kp = static_cast<std::size_t>(max_label(pred)) + 1;
    const std::size_t kt = static_cast<std::size_t>(max_label(truth)) + 1;
    ContingencyTable t;
    t.counts.assign(kp, std::vector<std::int64_t>(kt, 0));
    t.pred_marginals.assign(kp, 0);
    t.true_marginals.assign(kt, 0);
    t.total = static_cast<std::int64_t>(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        ++t.counts[pred[i]][truth[i]];
        ++t.pred_marginals[pred[i]];
        ++t.true_marginals[truth[i]];
    }
    return t;
}

// Shortest-augmenting-path assignment (Jonker-Volgenant style) on a square
// cost matrix derived from the benefit matrix.
std::vector<int> max_benefit_assignment(const std::vector<std::int64_t>& benefit,
                                        std::size_t n, std::size_t m) {
    const std::size_t dim = std::max(n, m);
    std::int64_t maxb = 0;
    for (auto b : benefit) maxb = std::max(maxb, b);

    auto cost = [&](std::size_t r, std::size_t c) -> double {
        if (r < n && c < m) return static_cast<double>(maxb - benefit[r * m + c]);
        return static_cast<double>(maxb);   // dummy row/column: zero benefit
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(dim + 1, 0.0), v(dim + 1, 0.0);
    std::vector<std::size_t> match(dim + 1, 0);   // column -> row (1-based)
    std::vector<std::size_t> way(dim + 1, 0);

    for (std::size_t r = 1; r <= dim; ++r) {
        match[0] = r;
        std::size_t j0 = 0;
        std::vector<double> minv(dim + 1, inf);
        std::vector<bool> used(dim + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= dim; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= dim; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> out(n, -1);
    for (std::size_t j = 1; j <= dim; ++j) {
        const std::size_t r = match[j];
        if (r >= 1 && r <= n && j <= m) out[r - 1] = static_cast<int>(j - 1);
    }
    return out;
}

AccuracyResult hungarian_accuracy(const std::vector<int>& pred,
                                  const std::vector<int>& truth) {
    const auto t = contingency(pred, truth);
    const std::size_t kp = t.counts.size();
    const std::size_t kt = t.counts[0].size();
    std::vector<std::int64_t> benefit(kp * kt);
    for (std::size_t r = 0; r < kp; ++r)
        for (std::size_t c = 0; c < kt; ++c) benefit[r * kt + c] = t.counts[r][c];

    AccuracyResult res;
    res.mapping = max_benefit_assignment(benefit, kp, kt);
    std::int64_t agree = 0;
    for (std::size_t r = 0; r < kp; ++r)
        if (res.mapping[r] >= 0) agree += t.counts[r][res.mapping[r]];
    res.acc = static_cast<double>(agree) / static_cast<double>(t.total);
    return res;
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
    const auto t = contingency(pred, truth);
    const double n = static_cast<double>(t.total);
    double hp = 0.0, ht = 0.0;
    for (auto a : t.pred_marginals)
        if (a > 0) hp -= (a / n) * std::log(a / n);
    for (auto b : t.true_marginals)
        if (b > 0) ht -= (b / n) * std::log(b / n);
    if (hp == 0.0 || ht == 0.0) return same_partition(t) ? 1.0 : 0.0;

    double mi = 0.0;
    for (std::size_t r = 0; r < t.counts.size(); ++r)
        for (std::size_t c = 0; c < t.counts[r].size(); ++c) {
            const auto nij = t.counts[r][c];
            if (nij == 0) continue;
            mi += (nij / n) *
                  std::log(n * static_cast<double>(nij) /
                           (static_cast<double>(t.pred_marginals[r]) *
                            static_cast<double>(t.true_marginals[c])));
        }
    return mi / (0.5 * (hp + ht));
}

double ari(const std::vector<int>& pred, const std::vector<int>& truth) {
    const auto t = contingency(pred, truth);
    if (t.total < 2) throw std::invalid_argument("ari requires at least 2 samples");

    double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& row : t.counts)
        for (auto v : row) sum_ij += binom2(v);
    for (auto a : t.pred_marginals) sum_a += binom2(a);
    for (auto b : t.true_marginals) sum_b += binom2(b);

    const double pairs = binom2(t.total);
    const double expected = sum_a * sum_b / pairs;
    const double max_index = 0.5 * (sum_a + sum_b);
    const double denom = max_index - expected;
    if (denom == 0.0) return same_partition(t) ? 1.0 : 0.0;
    return (sum_ij - expected) / denom;
}

double ranking_success_rate(const std::vector<int>& ranked_truth, int signal_class,
                            double p) {
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("p must be in (0, 1]");
    const std::size_t n = ranked_truth.size();
    const auto prefix = static_cast<std::size_t>(
        std::floor(p * static_cast<double>(n) + 0.5));
    if (prefix == 0) throw std::invalid_argument("empty ranked prefix");
    std::size_t signal = 0;
    for (std::size_t i = 0; i < prefix && i < n; ++i)
        signal += ranked_truth[i] == signal_class;
    return static_cast<double>(signal) / static_cast<double>(std::min(prefix, n));
}

int dominant_class(const std::vector<int>& truth_by_position) {
    if (truth_by_position.empty())
        throw std::invalid_argument("empty cluster");
    std::map<int, std::size_t> counts;
    for (int t : truth_by_position) ++counts[t];
    int best = -1;
    std::size_t best_count = 0;
    for (const auto& [label, c] : counts)
        if (c > best_count) {   // map iterates ascending: ties keep lowest label
            best = label;
            best_count = c;
        }
    return best;
}

EvaluationReport evaluate(
    const std::vector<int>& pred, const std::vector<int>& truth,
    const std::vector<std::pair<int, std::vector<std::size_t>>>& cluster_orders,
    const std::vector<double>& ps) {
    EvaluationReport rep;
    const auto acc = hungarian_accuracy(pred, truth);
    rep.acc = acc.acc;
    rep.mapping = acc.mapping;
    rep.nmi = nmi(pred, truth);
    rep.ari = ari(pred, truth);

    if (!cluster_orders.empty()) {
        // pooled signal / prefix totals per p, across clusters
        std::vector<double> pooled_signal(ps.size(), 0.0), pooled_total(ps.size(), 0.0);
        for (const auto& [cid, order] : cluster_orders) {
            std::vector<int> ranked_truth;
            ranked_truth.reserve(order.size());
            for (auto pos : order) ranked_truth.push_back(truth[pos]);
            const int sig = dominant_class(ranked_truth);
            ClusterRsr cr;
            cr.cluster_id = cid;
            for (std::size_t pi = 0; pi < ps.size(); ++pi) {
                const double r = ranking_success_rate(ranked_truth, sig, ps[pi]);
                cr.curve.push_back({ps[pi], r});
                const auto prefix = static_cast<double>(std::min<std::size_t>(
                    static_cast<std::size_t>(std::floor(
                        ps[pi] * static_cast<double>(order.size()) + 0.5)),
                    order.size()));
                pooled_signal[pi] += r * prefix;
                pooled_total[pi] += prefix;
            }
            rep.per_cluster_rsr.push_back(std::move(cr));
        }
        for (std::size_t pi = 0; pi < ps.size(); ++pi)
            rep.pooled_rsr.push_back(
                {ps[pi], pooled_total[pi] > 0 ? pooled_signal[pi] / pooled_total[pi] : 0.0});
    }
    return rep;
}

}  // namespace icsr
