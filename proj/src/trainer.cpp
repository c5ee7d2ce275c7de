#include "icsr/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "icsr/ranking.hpp"

namespace icsr {
namespace {

void softmax_row(const std::vector<double>& logits, double* out, int k) {
    double mx = logits[0];
    for (int c = 1; c < k; ++c) mx = std::max(mx, logits[c]);
    double sum = 0.0;
    for (int c = 0; c < k; ++c) {
        out[c] = std::exp(logits[c] - mx);
        sum += out[c];
    }
    for (int c = 0; c < k; ++c) out[c] /= sum;
}

// Single-sample forward pass; h (size H) and probs (size K) are outputs.
void forward_one(const ClassifierModel& m, const double* x, std::vector<double>& h,
                 std::vector<double>& probs) {
    const int d = m.input_dim, hd = m.hidden_dim, k = m.num_classes;
    std::vector<double> logits(k, 0.0);
    if (hd == 0) {
        for (int c = 0; c < k; ++c) {
            double z = m.b1[c];
            for (int i = 0; i < d; ++i) z += x[i] * m.w1[i * k + c];
            logits[c] = z;
        }
    } else {
        h.resize(hd);
        for (int j = 0; j < hd; ++j) {
            double z = m.b1[j];
            for (int i = 0; i < d; ++i) z += x[i] * m.w1[i * hd + j];
            h[j] = std::tanh(z);
        }
        for (int c = 0; c < k; ++c) {
            double z = m.b2[c];
            for (int j = 0; j < hd; ++j) z += h[j] * m.w2[j * k + c];
            logits[c] = z;
        }
    }
    probs.resize(k);
    softmax_row(logits, probs.data(), k);
}

int argmax_tie_low(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

void write_u64(std::ofstream& f, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    f.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_u64(std::ifstream& f) {
    unsigned char b[8];
    f.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void write_doubles(std::ofstream& f, const std::vector<double>& v) {
    write_u64(f, v.size());
    for (double x : v) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, 8);
        write_u64(f, bits);
    }
}

std::vector<double> read_doubles(std::ifstream& f) {
    std::vector<double> v(read_u64(f));
    for (auto& x : v) {
        const std::uint64_t bits = read_u64(f);
        std::memcpy(&x, &bits, 8);
    }
    return v;
}

}  // namespace

void TrainConfig::check() const {
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (momentum < 0.0 || momentum >= 1.0)
        throw std::invalid_argument("momentum must be in [0, 1)");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (!(beta0 > 0.0)) throw std::invalid_argument("beta0 must be > 0");
    if (augment_sigma < 0.0) throw std::invalid_argument("augment_sigma must be >= 0");
    if (augment_pairs < 1) throw std::invalid_argument("augment_pairs must be >= 1");
    if (rerank_every < 1) throw std::invalid_argument("rerank_every must be >= 1");
    if (hidden_dim < 0) throw std::invalid_argument("hidden_dim must be >= 0");
}

ClassifierModel ClassifierModel::init(int input_dim, int num_classes, int hidden_dim,
                                      Rng& rng) {
    ClassifierModel m;
    m.input_dim = input_dim;
    m.num_classes = num_classes;
    m.hidden_dim = hidden_dim;
    const int out1 = hidden_dim == 0 ? num_classes : hidden_dim;
    m.w1.resize(static_cast<std::size_t>(input_dim) * out1);
    for (auto& w : m.w1) w = 0.01 * rng.gaussian();
    m.b1.assign(out1, 0.0);
    if (hidden_dim > 0) {
        m.w2.resize(static_cast<std::size_t>(hidden_dim) * num_classes);
        for (auto& w : m.w2) w = 0.01 * rng.gaussian();
        m.b2.assign(num_classes, 0.0);
    }
    return m;
}

Matrix forward(const ClassifierModel& model, const Matrix& features) {
    if (static_cast<int>(features.cols) != model.input_dim)
        throw std::invalid_argument("feature dimension does not match model input_dim");
    Matrix out(features.rows, model.num_classes);
    std::vector<double> h, probs;
    for (std::size_t r = 0; r < features.rows; ++r) {
        forward_one(model, features.row(r), h, probs);
        std::copy(probs.begin(), probs.end(), out.row(r));
    }
    return out;
}

std::vector<int> pseudo_labels(const ClassifierModel& model, const Matrix& features) {
    const Matrix probs = forward(model, features);
    std::vector<int> labels(features.rows);
    for (std::size_t r = 0; r < probs.rows; ++r) {
        int best = 0;
        const double* row = probs.row(r);
        for (int c = 1; c < model.num_classes; ++c)
            if (row[c] > row[best]) best = c;
        labels[r] = best;
    }
    return labels;
}

double lct_loss(const ClassifierModel& model, const Matrix& features,
                const std::vector<BatchSample>& batch, double augment_sigma,
                int augment_pairs, Rng& rng, Gradients& grads) {
    const int d = model.input_dim, hd = model.hidden_dim, k = model.num_classes;
    grads.w1.assign(model.w1.size(), 0.0);
    grads.b1.assign(model.b1.size(), 0.0);
    grads.w2.assign(model.w2.size(), 0.0);
    grads.b2.assign(model.b2.size(), 0.0);
    if (batch.empty()) return 0.0;

    double loss = 0.0;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    const double inv_pairs = 1.0 / static_cast<double>(augment_pairs);
    std::vector<double> x(d), h, probs, hw, pw;

    // Samples are processed in batch order and pairs in index order so the
    // rng stream and the gradient sums are reproducible.
    for (const auto& s : batch) {
        const double* base = features.row(s.row);
        for (int pair = 0; pair < augment_pairs; ++pair) {
            // Weak branch: stored pseudo-labels (the current cluster
            // assignments) are the constant targets; when a sample carries no
            // label, the argmax of the weak-branch prediction is used instead.
            int label = s.label;
            if (label < 0) {
                if (augment_sigma > 0.0) {
                    for (int i = 0; i < d; ++i)
                        x[i] = base[i] + 0.25 * augment_sigma * rng.gaussian();
                } else {
                    std::copy(base, base + d, x.begin());
                }
                forward_one(model, x.data(), hw, pw);
                label = argmax_tie_low(pw);
            }
            // Strong branch: prediction on the heavier augmentation.
            if (augment_sigma > 0.0) {
                for (int i = 0; i < d; ++i)
                    x[i] = base[i] + augment_sigma * rng.gaussian();
            } else {
                std::copy(base, base + d, x.begin());
            }
            forward_one(model, x.data(), h, probs);

            const double coef = s.weight * inv_batch * inv_pairs;
            loss += coef * -std::log(std::max(probs[label], 1e-300));

            // d(logits): (p - onehot) * coef; backprop through the strong branch
            std::vector<double> dlog(k);
            for (int c = 0; c < k; ++c) dlog[c] = coef * (probs[c] - (c == label));
            if (hd == 0) {
                for (int i = 0; i < d; ++i)
                    for (int c = 0; c < k; ++c) grads.w1[i * k + c] += x[i] * dlog[c];
                for (int c = 0; c < k; ++c) grads.b1[c] += dlog[c];
            } else {
                std::vector<double> dh(hd, 0.0);
                for (int j = 0; j < hd; ++j) {
                    for (int c = 0; c < k; ++c) {
                        grads.w2[j * k + c] += h[j] * dlog[c];
                        dh[j] += model.w2[j * k + c] * dlog[c];
                    }
                }
                for (int c = 0; c < k; ++c) grads.b2[c] += dlog[c];
                for (int j = 0; j < hd; ++j) {
                    const double dz = dh[j] * (1.0 - h[j] * h[j]);
                    for (int i = 0; i < d; ++i) grads.w1[i * hd + j] += x[i] * dz;
                    grads.b1[j] += dz;
                }
            }
        }
    }
    return loss;
}

TrainResult train(const EmbeddingSet& set, const RankingConfig& rcfg,
                  const TrainConfig& tcfg, TrainMode mode) {
    tcfg.check();
    rcfg.check();
    const std::size_t n = set.size();
    const int k = set.num_clusters;
    Rng rng(tcfg.seed);

    TrainResult result;
    result.model = ClassifierModel::init(static_cast<int>(set.dim()), k,
                                         tcfg.hidden_dim, rng);

    std::unordered_map<std::int64_t, std::size_t> row_of;
    row_of.reserve(n);
    for (std::size_t i = 0; i < n; ++i) row_of[set.sample_ids[i]] = i;

    WeightSchedule schedule{rcfg.num_groups, tcfg.beta0, tcfg.residual_weight};

    std::vector<int> assignments = set.assignments;
    std::vector<int> group_of(n, kResidualGroup);

    auto rerank = [&](int epoch) {
        EmbeddingSet view;
        view.features = set.features;
        view.assignments = assignments;
        view.num_clusters = k;
        view.sample_ids = set.sample_ids;
        std::vector<bool> nonempty(k, false);
        for (int a : assignments) nonempty[a] = true;
        for (int c = 0; c < k; ++c)
            if (!nonempty[c])
                result.warnings.push_back("cluster " + std::to_string(c) +
                                          " empty at epoch " + std::to_string(epoch) +
                                          "; skipped in ranking");
        const auto groups = rank_all(view, rcfg, epoch, tcfg.threads);
        std::fill(group_of.begin(), group_of.end(), kResidualGroup);
        for (const auto& rg : groups) {
            for (std::size_t j = 0; j < rg.groups.size(); ++j)
                for (auto id : rg.groups[j])
                    group_of[row_of.at(id)] = static_cast<int>(j) + 1;
            for (auto id : rg.residual) group_of[row_of.at(id)] = kResidualGroup;
        }
    };

    std::vector<double> vel_w1(result.model.w1.size(), 0.0),
        vel_b1(result.model.b1.size(), 0.0), vel_w2(result.model.w2.size(), 0.0),
        vel_b2(result.model.b2.size(), 0.0);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Gradients grads;

    for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
        if (epoch % tcfg.rerank_every == 0) {
            if (epoch > 0) assignments = pseudo_labels(result.model, set.features);
            rerank(epoch);
        }

        double lr = tcfg.learning_rate;
        if (tcfg.lr_drop_epoch >= 0 && epoch >= tcfg.lr_drop_epoch) lr *= 0.1;

        // per-sample weight at this epoch
        std::vector<double> weight(n);
        for (std::size_t i = 0; i < n; ++i) {
            switch (mode) {
                case TrainMode::icsr:
                    weight[i] = group_of[i] == kResidualGroup
                                    ? schedule.residual_weight
                                    : group_weight(schedule, group_of[i], epoch);
                    break;
                case TrainMode::baseline_unweighted:
                    weight[i] = 1.0;
                    break;
                case TrainMode::baseline_topk_only:
                    weight[i] = group_of[i] == 1 ? 1.0 : 0.0;
                    break;
            }
        }

        // Fisher-Yates shuffle on the shared stream
        for (std::size_t i = n - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(rng.below(i + 1));
            std::swap(order[i], order[j]);
        }

        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n;
             start += static_cast<std::size_t>(tcfg.batch_size)) {
            const std::size_t end =
                std::min(start + static_cast<std::size_t>(tcfg.batch_size), n);
            std::vector<BatchSample> batch;
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i)
                batch.push_back({order[i], assignments[order[i]], weight[order[i]]});
            epoch_loss += lct_loss(result.model, set.features, batch,
                                   tcfg.augment_sigma, tcfg.augment_pairs, rng, grads);
            ++batches;

            auto update = [lr, &tcfg](std::vector<double>& w, std::vector<double>& vel,
                                      const std::vector<double>& g) {
                for (std::size_t i = 0; i < w.size(); ++i) {
                    vel[i] = tcfg.momentum * vel[i] - lr * g[i];
                    w[i] += vel[i];
                }
            };
            update(result.model.w1, vel_w1, grads.w1);
            update(result.model.b1, vel_b1, grads.b1);
            update(result.model.w2, vel_w2, grads.w2);
            update(result.model.b2, vel_b2, grads.b2);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.loss = batches > 0 ? epoch_loss / static_cast<double>(batches) : 0.0;
        if (set.has_truth()) {
            const auto preds = pseudo_labels(result.model, set.features);
            rec.acc = hungarian_accuracy(preds, set.truth_labels).acc;
            rec.nmi = nmi(preds, set.truth_labels);
            rec.ari = ari(preds, set.truth_labels);
        }
        result.history.push_back(rec);
    }

    result.final_predictions = pseudo_labels(result.model, set.features);
    return result;
}

void save_checkpoint(const std::string& path, const ClassifierModel& model, int epoch,
                     const Rng& rng) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    f.write("ICKP", 4);
    write_u64(f, 1);   // version
    write_u64(f, static_cast<std::uint64_t>(model.input_dim));
    write_u64(f, static_cast<std::uint64_t>(model.hidden_dim));
    write_u64(f, static_cast<std::uint64_t>(model.num_classes));
    write_u64(f, static_cast<std::uint64_t>(epoch));
    write_doubles(f, model.w1);
    write_doubles(f, model.b1);
    write_doubles(f, model.w2);
    write_doubles(f, model.b2);
    std::ostringstream state;
    state << rng.engine();
    const std::string s = state.str();
    write_u64(f, s.size());
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!f) throw std::runtime_error("checkpoint write failed: " + path);
}

void load_checkpoint(const std::string& path, ClassifierModel& model, int& epoch,
                     Rng& rng) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "ICKP", 4) != 0)
        throw std::runtime_error("bad checkpoint magic in " + path);
    const auto version = read_u64(f);
    if (version != 1)
        throw std::runtime_error("unsupported checkpoint version " +
                                 std::to_string(version));
    model.input_dim = static_cast<int>(read_u64(f));
    model.hidden_dim = static_cast<int>(read_u64(f));
    model.num_classes = static_cast<int>(read_u64(f));
    epoch = static_cast<int>(read_u64(f));
    model.w1 = read_doubles(f);
    model.b1 = read_doubles(f);
    model.w2 = read_doubles(f);
    model.b2 = read_doubles(f);
    std::string s(read_u64(f), '\0');
    f.read(s.data(), static_cast<std::streamsize>(s.size()));
    if (!f) throw std::runtime_error("truncated checkpoint: " + path);
    std::istringstream state(s);
    state >> rng.engine();
}

}  // namespace icsr
