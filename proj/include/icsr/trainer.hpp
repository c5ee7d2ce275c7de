#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "icsr/core.hpp"
#include "icsr/metrics.hpp"
#include "icsr/rng.hpp"
#include "icsr/weighting.hpp"

namespace icsr {

// Softmax classifier over feature vectors; hidden_dim == 0 is a plain
// linear model, otherwise one tanh hidden layer.
struct ClassifierModel {
    int input_dim = 0;
    int hidden_dim = 0;
    int num_classes = 0;
    std::vector<double> w1, b1;   // D x H (or D x K when linear), length-H bias
    std::vector<double> w2, b2;   // H x K; empty when linear

    static ClassifierModel init(int input_dim, int num_classes, int hidden_dim,
                                Rng& rng);
};

struct Gradients {
    std::vector<double> w1, b1, w2, b2;
};

struct TrainConfig {
    int epochs = 240;
    double learning_rate = 0.005;
    double momentum = 0.9;
    int batch_size = 128;
    double beta0 = 0.02;
    double augment_sigma = 0.5;   // strong-branch noise std; weak branch uses sigma/4
    int augment_pairs = 1;
    int rerank_every = 10;
    std::uint64_t seed = 0;
    int hidden_dim = 0;
    int lr_drop_epoch = -1;       // x0.1 at this epoch; -1 disables
    double residual_weight = 0.0;
    int threads = 1;

    void check() const;
};

enum class TrainMode { icsr, baseline_unweighted, baseline_topk_only };

// Softmax probabilities, one row per sample. Rows sum to 1 within 1e-9.
Matrix forward(const ClassifierModel& model, const Matrix& features);

// Argmax labels per row; ties broken by lowest class index.
std::vector<int> pseudo_labels(const ClassifierModel& model, const Matrix& features);

struct BatchSample {
    std::size_t row = 0;    // feature row
    int label = 0;          // pseudo-label; < 0 = derive from the weak branch
    double weight = 1.0;
};

// Label-consistent loss over a weighted batch: per (i, j) augmentation pair,
// the pseudo-label comes from the weak branch (sigma / 4 noise) and the
// cross-entropy is taken against the strong-branch prediction; pseudo-labels
// are treated as constants. Returns the loss and exact gradients.
double lct_loss(const ClassifierModel& model, const Matrix& features,
                const std::vector<BatchSample>& batch, double augment_sigma,
                int augment_pairs, Rng& rng, Gradients& grads);

struct EpochRecord {
    int epoch = 0;
    double loss = 0.0;
    double acc = -1.0;   // -1 when no ground truth
    double nmi = -1.0;
    double ari = -1.0;
};

struct TrainResult {
    ClassifierModel model;
    std::vector<EpochRecord> history;
    std::vector<std::string> warnings;
    std::vector<int> final_predictions;
};

// Weighted self-training loop: every rerank_every epochs the clusters are
// reassigned from the model's own predictions and re-ranked; group weights
// follow the schedule at the current epoch. Deterministic given the seed.
TrainResult train(const EmbeddingSet& set, const RankingConfig& rcfg,
                  const TrainConfig& tcfg, TrainMode mode = TrainMode::icsr);

// Versioned binary checkpoint: parameters, epoch, rng state.
void save_checkpoint(const std::string& path, const ClassifierModel& model, int epoch,
                     const Rng& rng);
void load_checkpoint(const std::string& path, ClassifierModel& model, int& epoch,
                     Rng& rng);

}  // namespace icsr
