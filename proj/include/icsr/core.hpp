#pragma once
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace icsr {

// Row-major dense matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
    double* row(std::size_t r) { return data.data() + r * cols; }
};

// N feature vectors, each assigned to one of K clusters.
struct EmbeddingSet {
    Matrix features;                        // N x D
    std::vector<int> assignments;           // length N, values in [0, K)
    int num_clusters = 0;                   // K
    std::vector<std::int64_t> sample_ids;   // length N, unique; default 0..N-1
    std::vector<int> truth_labels;          // optional; empty when absent

    std::size_t size() const { return features.rows; }
    std::size_t dim() const { return features.cols; }
    bool has_truth() const { return !truth_labels.empty(); }

    // Indices (row positions) of the members of cluster c, ascending.
    std::vector<std::size_t> cluster_members(int c) const;
};

enum class DistanceMetric { euclidean, cosine };

struct RankingConfig {
    double k0_fraction = 1.0 / 3.0;
    int k_step = 5;
    double kmax_fraction = 2.0 / 3.0;
    int num_groups = 5;                               // m
    std::vector<double> p_fractions = {0.15, 0.35, 0.55, 0.75, 0.95};
    double p_increment_per_epoch_block = 0.01;        // added per 50-epoch block
    DistanceMetric distance = DistanceMetric::euclidean;
    bool normalize_features = false;

    // Throws std::invalid_argument naming the offending field.
    void check() const;
};

struct NoiseScoreTable {
    int cluster_id = 0;
    std::vector<std::int64_t> sample_ids;   // the cluster's ids, in member order
    std::vector<int> k_values;              // ascending
    Matrix scores;                          // k_values.size() x N_c
};

struct RankedGroups {
    int cluster_id = 0;
    std::vector<std::vector<std::int64_t>> groups;   // g_1 .. g_m, ordered
    std::vector<std::int64_t> residual;              // never selected
};

struct WeightSchedule {
    int num_groups = 5;        // m
    double beta0 = 0.02;
    double residual_weight = 0.0;
};

struct Violation {
    std::string field;
    std::string message;
};

// Structural checks on an EmbeddingSet; malformed input yields violations,
// never throws.
std::vector<Violation> validate(const EmbeddingSet& set);

// k sweep {k_0, k_0 + step, ...} with k_0 = max(1, floor(k0_fraction * N_c)),
// truncated at min(floor(kmax_fraction * N_c), N_c - 1). Never empty.
// Throws on cluster_size < 2.
std::vector<int> resolve_k_sweep(const RankingConfig& cfg, std::size_t cluster_size);

// p fractions after the per-50-epoch increment at epoch t, clamped to 1.
std::vector<double> effective_p_fractions(const RankingConfig& cfg, int epoch);

// Cumulative selection targets round(p * cluster_size), half-up, made
// non-decreasing and capped at cluster_size.
std::vector<std::size_t> p_targets(const std::vector<double>& fractions,
                                   std::size_t cluster_size);

}  // namespace icsr
