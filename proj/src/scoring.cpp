#include "icsr/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "icsr/parallel.hpp"

namespace icsr {
namespace {

double euclidean(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = a[i] - b[i];
        s += diff * diff;
    }
    return std::sqrt(s);
}

double norm2(const double* a, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += a[i] * a[i];
    return std::sqrt(s);
}

double cosine_distance(const double* a, const double* b, double na, double nb,
                       std::size_t d) {
    double dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) dot += a[i] * b[i];
    double dist = 1.0 - dot / (na * nb);
    return dist < 0.0 ? 0.0 : dist;   // clip tiny negative from rounding
}

}  // namespace

DistanceMatrix pairwise_distances(const EmbeddingSet& set, int cluster_id,
                                  DistanceMetric metric, bool normalize_features,
                                  int threads) {
    const auto members = set.cluster_members(cluster_id);
    const std::size_t nc = members.size();
    if (nc < 2)
        throw std::invalid_argument("degenerate cluster " + std::to_string(cluster_id) +
                                    ": size " + std::to_string(nc) + " < 2");
    const std::size_t d = set.dim();

    // Local copy of the member rows; normalized once if requested.
    Matrix feats(nc, d);
    for (std::size_t i = 0; i < nc; ++i) {
        const double* src = set.features.row(members[i]);
        std::copy(src, src + d, feats.row(i));
    }
    std::vector<double> norms(nc, 1.0);
    if (normalize_features || metric == DistanceMetric::cosine) {
        for (std::size_t i = 0; i < nc; ++i) {
            norms[i] = norm2(feats.row(i), d);
            if (norms[i] == 0.0) {
                if (metric == DistanceMetric::cosine || normalize_features)
                    throw std::invalid_argument(
                        "zero-norm feature vector for sample id " +
                        std::to_string(set.sample_ids[members[i]]));
            }
        }
        if (normalize_features) {
            for (std::size_t i = 0; i < nc; ++i) {
                double* r = feats.row(i);
                for (std::size_t j = 0; j < d; ++j) r[j] /= norms[i];
                norms[i] = 1.0;
            }
        }
    }

    DistanceMatrix dm;
    dm.cluster_id = cluster_id;
    dm.sample_ids.resize(nc);
    for (std::size_t i = 0; i < nc; ++i) dm.sample_ids[i] = set.sample_ids[members[i]];
    dm.values = Matrix(nc, nc - 1);

    parallel_for(nc, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<std::pair<double, std::int64_t>> row(nc - 1);
        for (std::size_t i = begin; i < end; ++i) {
            std::size_t w = 0;
            for (std::size_t j = 0; j < nc; ++j) {
                if (j == i) continue;
                double dist = metric == DistanceMetric::euclidean
                                  ? euclidean(feats.row(i), feats.row(j), d)
                                  : cosine_distance(feats.row(i), feats.row(j),
                                                    norms[i], norms[j], d);
                row[w++] = {dist, dm.sample_ids[j]};
            }
            std::sort(row.begin(), row.end());
            double* out = dm.values.row(i);
            for (std::size_t j = 0; j + 1 < nc; ++j) out[j] = row[j].first;
        }
    });
    return dm;
}

std::vector<double> noise_score(const DistanceMatrix& dm, int k) {
    const std::size_t nc = dm.values.rows;
    if (k < 1 || static_cast<std::size_t>(k) > nc - 1)
        throw std::invalid_argument("k = " + std::to_string(k) +
                                    " out of range [1, " + std::to_string(nc - 1) + "]");
    std::vector<double> out(nc);
    for (std::size_t s = 0; s < nc; ++s) {
        const double* row = dm.values.row(s);
        double sum = 0.0;
        for (int i = 0; i < k; ++i) sum += row[i];
        const double mean = sum / k;
        const double median = (k % 2 == 1)
                                  ? row[k / 2]
                                  : 0.5 * (row[k / 2 - 1] + row[k / 2]);
        out[s] = mean + median;
    }
    return out;
}

NoiseScoreTable score_table(const EmbeddingSet& set, const RankingConfig& cfg,
                            int cluster_id, int threads) {
    const auto members = set.cluster_members(cluster_id);
    const auto ks = resolve_k_sweep(cfg, members.size());
    const DistanceMatrix dm =
        pairwise_distances(set, cluster_id, cfg.distance, cfg.normalize_features, threads);

    NoiseScoreTable table;
    table.cluster_id = cluster_id;
    table.sample_ids = dm.sample_ids;
    table.k_values = ks;
    table.scores = Matrix(ks.size(), dm.sample_ids.size());
    for (std::size_t a = 0; a < ks.size(); ++a) {
        const auto m = noise_score(dm, ks[a]);
        std::copy(m.begin(), m.end(), table.scores.row(a));
    }
    return table;
}

}  // namespace icsr
