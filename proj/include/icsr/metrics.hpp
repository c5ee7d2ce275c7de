#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "icsr/core.hpp"

namespace icsr {

struct ContingencyTable {
    std::vector<std::vector<std::int64_t>> counts;   // K_pred x K_true
    std::vector<std::int64_t> pred_marginals;
    std::vector<std::int64_t> true_marginals;
    std::int64_t total = 0;
};

ContingencyTable contingency(const std::vector<int>& pred, const std::vector<int>& truth);

struct AccuracyResult {
    double acc = 0.0;
    std::vector<int> mapping;   // cluster -> class; -1 for unmatched clusters
};

// Clustering accuracy under the best injective cluster-to-class assignment,
// solved exactly (rectangular cases padded with zero-benefit dummies).
AccuracyResult hungarian_accuracy(const std::vector<int>& pred,
                                  const std::vector<int>& truth);

// Exact max-benefit assignment on an n x m benefit matrix (row-major);
// returns the column chosen per row, -1 when matched to a dummy.
std::vector<int> max_benefit_assignment(const std::vector<std::int64_t>& benefit,
                                        std::size_t n, std::size_t m);

// Mutual information over entropies' arithmetic mean, natural log. Returns 1
// when the partitions are identical, 0 when either entropy is zero otherwise.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth);

// Pair-counting adjusted Rand index. Degenerate denominator: 1 when the
// partitions are identical, else 0.
double ari(const std::vector<int>& pred, const std::vector<int>& truth);

// Fraction of signal-class samples among the top round(p * n) of a ranked
// cluster order; ranked_truth holds the truth label at each ranked position.
double ranking_success_rate(const std::vector<int>& ranked_truth, int signal_class,
                            double p);

// Modal ground-truth label of a cluster order; ties go to the lowest label.
int dominant_class(const std::vector<int>& truth_by_position);

struct RsrPoint {
    double p = 0.0;
    double value = 0.0;
};

struct ClusterRsr {
    int cluster_id = 0;
    std::vector<RsrPoint> curve;
};

struct EvaluationReport {
    double acc = 0.0;
    double nmi = 0.0;
    double ari = 0.0;
    std::vector<int> mapping;
    std::vector<ClusterRsr> per_cluster_rsr;
    std::vector<RsrPoint> pooled_rsr;
};

// Full report: metrics trio plus R_sr curves over the given per-cluster
// ranked orders (sample positions into `truth`).
EvaluationReport evaluate(const std::vector<int>& pred, const std::vector<int>& truth,
                          const std::vector<std::pair<int, std::vector<std::size_t>>>&
                              cluster_orders = {},
                          const std::vector<double>& ps = {0.2, 0.4, 0.6, 0.8});

}  // namespace icsr
