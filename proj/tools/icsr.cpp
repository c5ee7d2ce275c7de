// icsr: rank cluster samples by noise likelihood, weight pseudo-labels,
// self-train, and evaluate. Exit codes: 0 ok, 1 internal, 2 input, 3 config.
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>

#include "icsr/datagen.hpp"
#include "icsr/io.hpp"
#include "icsr/metrics.hpp"
#include "icsr/parallel.hpp"
#include "icsr/ranking.hpp"
#include "icsr/trainer.hpp"
#include "icsr/weighting.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_double_list(const std::string& s, const char* field) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ConfigError(std::string(field) + ": unparsable value '" + cell + "'");
        }
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& s, const char* field) {
    std::vector<int> out;
    for (double v : parse_double_list(s, field)) out.push_back(static_cast<int>(v));
    return out;
}

icsr::EmbeddingSet load_embeddings(const std::string& path, const std::string& format) {
    if (format == "csv" ||
        (format == "auto" && path.size() > 4 && path.substr(path.size() - 4) == ".csv"))
        return icsr::read_embedding_csv(path);
    return icsr::read_embedding_file(path);
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
    } else {
        std::ofstream f(out_path);
        if (!f) throw std::runtime_error("cannot open for writing: " + out_path);
        f << text;
    }
}

icsr::RankingConfig make_ranking_config(double k0_frac, double kmax_frac, int k_step,
                                        int m, const std::string& p_list,
                                        const std::string& metric, bool normalize) {
    icsr::RankingConfig cfg;
    cfg.k0_fraction = k0_frac;
    cfg.kmax_fraction = kmax_frac;
    cfg.k_step = k_step;
    cfg.num_groups = m;
    if (!p_list.empty()) cfg.p_fractions = parse_double_list(p_list, "--p");
    if (static_cast<int>(cfg.p_fractions.size()) != m) {
        if (p_list.empty() && m == 1)
            cfg.p_fractions = {1.0};
        else if (p_list.empty())
            throw ConfigError("--p: must supply " + std::to_string(m) +
                              " fractions for --m " + std::to_string(m));
    }
    if (metric == "euclidean")
        cfg.distance = icsr::DistanceMetric::euclidean;
    else if (metric == "cosine")
        cfg.distance = icsr::DistanceMetric::cosine;
    else
        throw ConfigError("--metric: must be euclidean or cosine");
    cfg.normalize_features = normalize;
    try {
        cfg.check();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

// Per-cluster ranked orders (positions into the set) from a ranking report,
// or id order per cluster when no report is given.
std::vector<std::pair<int, std::vector<std::size_t>>> cluster_orders(
    const icsr::EmbeddingSet& set, const std::vector<icsr::RankedGroups>* groups) {
    std::unordered_map<std::int64_t, std::size_t> row_of;
    for (std::size_t i = 0; i < set.size(); ++i) row_of[set.sample_ids[i]] = i;
    std::vector<std::pair<int, std::vector<std::size_t>>> out;
    if (groups) {
        for (const auto& rg : *groups) {
            std::vector<std::size_t> order;
            for (const auto& g : rg.groups)
                for (auto id : g) order.push_back(row_of.at(id));
            for (auto id : rg.residual) order.push_back(row_of.at(id));
            out.emplace_back(rg.cluster_id, std::move(order));
        }
    } else {
        for (int c = 0; c < set.num_clusters; ++c) {
            auto members = set.cluster_members(c);
            if (!members.empty()) out.emplace_back(c, std::move(members));
        }
    }
    return out;
}

std::string history_csv(const icsr::TrainResult& result) {
    std::ostringstream os;
    os << "epoch,loss,acc,nmi,ari\n" << std::setprecision(10);
    for (const auto& r : result.history)
        os << r.epoch << "," << r.loss << "," << r.acc << "," << r.nmi << "," << r.ari
           << "\n";
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Image clustering sample ranking and weighted self-training"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = auto, env ICSR_THREADS)");

    std::string input, output, format = "auto";

    // generate
    auto* gen = app.add_subcommand("generate", "synthesize a Gaussian-mixture benchmark");
    icsr::BenchmarkSpec spec;
    gen->add_option("--k", spec.num_classes, "class count");
    gen->add_option("--per-cluster", spec.per_cluster, "samples per cluster");
    gen->add_option("--dim", spec.dim, "feature dimension");
    gen->add_option("--dominant", spec.dominant_fraction, "dominant-class fraction");
    gen->add_option("--signal-std", spec.signal_std, "dominant sample std");
    gen->add_option("--noise-std", spec.noise_std, "contaminant sample std");
    gen->add_option("--separation", spec.center_separation, "min center distance");
    gen->add_option("--seed", spec.seed, "rng seed");
    gen->add_option("--out", output, "output path")->required();
    gen->add_option("--format", format, "bin|csv|auto");

    // rank
    auto* rank = app.add_subcommand("rank", "rank cluster samples into groups");
    double k0_frac = 1.0 / 3.0, kmax_frac = 2.0 / 3.0;
    int k_step = 5, m_groups = 5, epoch = 0;
    std::string p_list, metric = "euclidean";
    bool normalize = false;
    rank->add_option("--input,input", input, "embedding file")->required();
    rank->add_option("--k0-frac", k0_frac, "smallest k as a fraction of cluster size");
    rank->add_option("--kmax-frac", kmax_frac, "largest k as a fraction of cluster size");
    rank->add_option("--k-step", k_step, "stride between k values");
    rank->add_option("--m", m_groups, "group count");
    rank->add_option("--p", p_list, "comma list of p fractions");
    rank->add_option("--epoch", epoch, "epoch for the p increment");
    rank->add_option("--metric", metric, "euclidean|cosine");
    rank->add_flag("--normalize", normalize, "L2-normalize features first");
    rank->add_option("--out", output, "report path (default stdout)");
    rank->add_option("--format", format, "bin|csv|auto");

    // weights
    auto* weights = app.add_subcommand("weights", "tabulate the weight schedule");
    int w_m = 5;
    double w_beta0 = 0.02;
    std::string epochs_list = "0";
    weights->add_option("--m", w_m, "group count");
    weights->add_option("--beta0", w_beta0, "schedule parameter");
    weights->add_option("--epochs", epochs_list, "comma list of epochs");
    weights->add_option("--out", output, "CSV path (default stdout)");

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "ACC/NMI/ARI and R_sr diagnostics");
    std::string ranking_path, json_out;
    eval->add_option("--input,input", input, "embedding file with truth labels")
        ->required();
    eval->add_option("--ranking", ranking_path, "ranking report JSON for R_sr order");
    eval->add_option("--json", json_out, "write JSON report here");
    eval->add_option("--out", output, "table path (default stdout)");
    eval->add_option("--format", format, "bin|csv|auto");

    // train (flags shared with sweep)
    icsr::TrainConfig tcfg;
    tcfg.epochs = 100;
    std::string baseline, checkpoint_path, metrics_csv, beta0_list;
    auto add_train_flags = [&](CLI::App* cmd) {
        cmd->add_option("--input,input", input, "embedding file")->required();
        cmd->add_option("--epochs", tcfg.epochs, "training epochs");
        cmd->add_option("--lr", tcfg.learning_rate, "learning rate");
        cmd->add_option("--momentum", tcfg.momentum, "SGD momentum");
        cmd->add_option("--batch", tcfg.batch_size, "batch size");
        cmd->add_option("--sigma", tcfg.augment_sigma, "feature noise std");
        cmd->add_option("--pairs", tcfg.augment_pairs, "augmentation pairs per sample");
        cmd->add_option("--rerank-every", tcfg.rerank_every, "epochs between rerankings");
        cmd->add_option("--seed", tcfg.seed, "rng seed");
        cmd->add_option("--hidden", tcfg.hidden_dim, "hidden layer width (0 = linear)");
        cmd->add_option("--lr-drop", tcfg.lr_drop_epoch, "drop lr x0.1 at this epoch");
        cmd->add_option("--residual-weight", tcfg.residual_weight,
                        "weight for unranked samples");
        cmd->add_option("--m", m_groups, "group count");
        cmd->add_option("--p", p_list, "comma list of p fractions");
        cmd->add_option("--k0-frac", k0_frac, "smallest k fraction");
        cmd->add_option("--kmax-frac", kmax_frac, "largest k fraction");
        cmd->add_option("--k-step", k_step, "k stride");
        cmd->add_option("--metric", metric, "euclidean|cosine");
        cmd->add_option("--metrics-csv", metrics_csv, "per-epoch metrics CSV path");
        cmd->add_option("--format", format, "bin|csv|auto");
    };
    auto* train_cmd = app.add_subcommand("train", "weighted self-training");
    add_train_flags(train_cmd);
    train_cmd->add_option("--beta0", tcfg.beta0, "weight schedule parameter");
    train_cmd->add_option("--baseline", baseline, "unweighted|topk-only control run");
    train_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint output path");

    auto* sweep = app.add_subcommand("sweep", "train once per beta0 value");
    add_train_flags(sweep);
    sweep->add_option("--beta0", beta0_list, "comma list of beta0 values")->required();
    sweep->add_option("--out", output, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (*gen) {
            try {
                spec.check();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            const auto set = icsr::generate(spec);
            if (format == "csv" || (format == "auto" && output.size() > 4 &&
                                    output.substr(output.size() - 4) == ".csv"))
                icsr::write_embedding_csv(output, set);
            else
                icsr::write_embedding_file(output, set);
            return kExitOk;
        }

        if (*rank) {
            const auto cfg = make_ranking_config(k0_frac, kmax_frac, k_step, m_groups,
                                                 p_list, metric, normalize);
            const auto set = load_embeddings(input, format);
            const auto violations = icsr::validate(set);
            if (!violations.empty())
                throw icsr::FormatError(violations[0].field, violations[0].message);
            const auto groups = icsr::rank_all(set, cfg, epoch, threads);
            emit(icsr::ranking_report_json(groups, cfg, epoch), output);
            return kExitOk;
        }

        if (*weights) {
            if (!(w_beta0 > 0.0)) throw ConfigError("--beta0: must be > 0");
            if (w_m < 1) throw ConfigError("--m: must be >= 1");
            const auto epochs = parse_int_list(epochs_list, "--epochs");
            if (epochs.empty()) throw ConfigError("--epochs: empty list");
            icsr::WeightSchedule sched{w_m, w_beta0, 0.0};
            std::ostringstream os;
            os << "epoch";
            for (int i = 1; i <= w_m; ++i) os << ",w_" << i;
            os << "\n" << std::setprecision(10);
            for (int t : epochs) {
                if (t < 0) throw ConfigError("--epochs: must be >= 0");
                os << t;
                for (int i = 1; i <= w_m; ++i) os << "," << icsr::group_weight(sched, i, t);
                os << "\n";
            }
            emit(os.str(), output);
            return kExitOk;
        }

        if (*eval) {
            const auto set = load_embeddings(input, format);
            if (!set.has_truth())
                throw icsr::FormatError("truth_labels", "input carries no truth labels");
            std::vector<icsr::RankedGroups> groups;
            const std::vector<icsr::RankedGroups>* groups_ptr = nullptr;
            if (!ranking_path.empty()) {
                std::ifstream f(ranking_path);
                if (!f) throw icsr::FormatError("ranking", "cannot open: " + ranking_path);
                std::stringstream buf;
                buf << f.rdbuf();
                groups = icsr::parse_ranking_report(buf.str());
                groups_ptr = &groups;
            }
            const auto rep = icsr::evaluate(set.assignments, set.truth_labels,
                                            cluster_orders(set, groups_ptr));
            if (!json_out.empty()) emit(icsr::evaluation_report_json(rep), json_out);
            emit(icsr::evaluation_report_table(rep), output);
            return kExitOk;
        }

        if (*train_cmd || *sweep) {
            const auto rcfg = make_ranking_config(k0_frac, kmax_frac, k_step, m_groups,
                                                  p_list, metric, false);
            tcfg.threads = threads;
            try {
                tcfg.check();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            const auto set = load_embeddings(input, format);

            if (*train_cmd) {
                icsr::TrainMode mode = icsr::TrainMode::icsr;
                if (baseline == "unweighted")
                    mode = icsr::TrainMode::baseline_unweighted;
                else if (baseline == "topk-only")
                    mode = icsr::TrainMode::baseline_topk_only;
                else if (!baseline.empty())
                    throw ConfigError("--baseline: must be unweighted or topk-only");
                const auto result = icsr::train(set, rcfg, tcfg, mode);
                for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
                if (!metrics_csv.empty()) emit(history_csv(result), metrics_csv);
                if (!checkpoint_path.empty()) {
                    icsr::Rng rng(tcfg.seed);
                    icsr::save_checkpoint(checkpoint_path, result.model, tcfg.epochs, rng);
                }
                if (!result.history.empty()) {
                    const auto& last = result.history.back();
                    std::cout << std::setprecision(6) << "final loss " << last.loss;
                    if (last.acc >= 0)
                        std::cout << " acc " << last.acc << " nmi " << last.nmi << " ari "
                                  << last.ari;
                    std::cout << "\n";
                }
                return kExitOk;
            }

            // sweep
            const auto betas = parse_double_list(beta0_list, "--beta0");
            if (betas.empty()) throw ConfigError("--beta0: empty list");
            for (double b : betas)
                if (!(b > 0.0)) throw ConfigError("--beta0: values must be > 0");
            std::vector<icsr::TrainResult> results;
            for (double b : betas) {
                icsr::TrainConfig c = tcfg;
                c.beta0 = b;
                results.push_back(icsr::train(set, rcfg, c, icsr::TrainMode::icsr));
            }
            std::ostringstream os;
            os << "epoch";
            for (double b : betas) os << ",acc_beta0=" << b;
            os << "\n" << std::setprecision(10);
            for (int e = 0; e < tcfg.epochs; ++e) {
                os << e;
                for (const auto& r : results) os << "," << r.history[e].acc;
                os << "\n";
            }
            os << "final";
            for (const auto& r : results) os << "," << r.history.back().acc;
            os << "\n";
            emit(os.str(), output);
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const icsr::FormatError& e) {
        std::cerr << "error: " << e.field << ": " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
