// Acceptance suite: prints one pass/fail line per criterion and exits
// nonzero if any fail. argv[1] is the path to the icsr CLI binary.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "icsr/datagen.hpp"
#include "icsr/io.hpp"
#include "icsr/metrics.hpp"
#include "icsr/ranking.hpp"
#include "icsr/scoring.hpp"
#include "icsr/trainer.hpp"
#include "icsr/weighting.hpp"

using namespace icsr;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": "
              << detail << std::endl;
    if (!ok) ++g_failures;
}

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::vector<int> random_labels(std::mt19937_64& rng, std::size_t n, int k) {
    std::vector<int> v(n);
    for (auto& x : v) x = static_cast<int>(rng() % k);
    return v;
}

double brute_force_acc(const std::vector<int>& pred, const std::vector<int>& truth) {
    const auto t = contingency(pred, truth);
    const std::size_t kp = t.counts.size(), kt = t.counts[0].size();
    std::vector<int> perm(std::max(kp, kt));
    std::iota(perm.begin(), perm.end(), 0);
    std::int64_t best = 0;
    do {
        std::int64_t agree = 0;
        for (std::size_t r = 0; r < kp; ++r)
            if (static_cast<std::size_t>(perm[r]) < kt) agree += t.counts[r][perm[r]];
        best = std::max(best, agree);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(t.total);
}

double brute_force_ari(const std::vector<int>& pred, const std::vector<int>& truth) {
    double a = 0, b = 0, c = 0, d = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        for (std::size_t j = i + 1; j < pred.size(); ++j) {
            const bool sp = pred[i] == pred[j], st = truth[i] == truth[j];
            (sp ? (st ? a : b) : (st ? c : d)) += 1.0;
        }
    const double pairs = a + b + c + d;
    const double expected = (a + b) * (a + c) / pairs;
    const double max_index = 0.5 * ((a + b) + (a + c));
    if (max_index == expected) return 1.0;
    return (a - expected) / (max_index - expected);
}

double direct_nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
    const auto t = contingency(pred, truth);
    const double n = static_cast<double>(t.total);
    double hp = 0, ht = 0, mi = 0;
    for (auto v : t.pred_marginals)
        if (v) hp -= v / n * std::log(v / n);
    for (auto v : t.true_marginals)
        if (v) ht -= v / n * std::log(v / n);
    for (std::size_t r = 0; r < t.counts.size(); ++r)
        for (std::size_t c2 = 0; c2 < t.counts[r].size(); ++c2)
            if (t.counts[r][c2])
                mi += t.counts[r][c2] / n *
                      std::log(n * t.counts[r][c2] /
                               (double(t.pred_marginals[r]) * t.true_marginals[c2]));
    if (hp == 0 || ht == 0) return -1;   // oracle undefined, skip instance
    return mi / (0.5 * (hp + ht));
}

// The standard synthetic benchmark used by criteria 5-7.
BenchmarkSpec standard_benchmark(std::uint64_t seed) {
    BenchmarkSpec spec;
    spec.num_classes = 5;
    spec.per_cluster = 200;
    spec.dim = 16;
    spec.dominant_fraction = 0.7;
    spec.signal_std = 1.0;
    spec.noise_std = 1.0;
    spec.center_separation = 0.9;
    spec.seed = seed;
    return spec;
}

// A one-hidden-layer model with a high enough learning rate to start fitting
// the contaminated labels within the first ranking interval; the weighted run
// suppresses that memorization while the unweighted control absorbs it.
TrainConfig standard_train_config(std::uint64_t seed) {
    TrainConfig tcfg;
    tcfg.epochs = 100;
    tcfg.learning_rate = 0.2;
    tcfg.momentum = 0.9;
    tcfg.batch_size = 128;
    tcfg.beta0 = 0.02;
    tcfg.augment_sigma = 0.1;
    tcfg.augment_pairs = 1;
    tcfg.rerank_every = 50;
    tcfg.hidden_dim = 128;
    tcfg.seed = seed;
    tcfg.threads = 1;
    return tcfg;
}

std::vector<std::pair<int, std::vector<std::size_t>>> ranked_orders(
    const EmbeddingSet& set, const std::vector<RankedGroups>& groups) {
    std::vector<std::pair<int, std::vector<std::size_t>>> orders;
    for (const auto& rg : groups) {
        std::vector<std::size_t> order;
        for (const auto& g : rg.groups)
            for (auto id : g) order.push_back(static_cast<std::size_t>(id));
        for (auto id : rg.residual) order.push_back(static_cast<std::size_t>(id));
        orders.emplace_back(rg.cluster_id, std::move(order));
    }
    (void)set;
    return orders;
}

void criterion_1() {
    const double t0 = now_seconds();
    std::mt19937_64 rng(1001);
    bool ok = true;
    std::string detail;

    for (int trial = 0; trial < 100 && ok; ++trial) {
        const std::size_t n = 5 + rng() % 196;
        auto pred = random_labels(rng, n, 1 + static_cast<int>(rng() % 7));
        auto truth = random_labels(rng, n, 1 + static_cast<int>(rng() % 7));
        if (hungarian_accuracy(pred, truth).acc != brute_force_acc(pred, truth)) {
            ok = false;
            detail = "hungarian accuracy mismatch at trial " + std::to_string(trial);
        }
    }
    for (int trial = 0; trial < 100 && ok; ++trial) {
        const std::size_t n = 4 + rng() % 57;
        auto pred = random_labels(rng, n, 2 + static_cast<int>(rng() % 5));
        auto truth = random_labels(rng, n, 2 + static_cast<int>(rng() % 5));
        if (std::abs(ari(pred, truth) - brute_force_ari(pred, truth)) > 1e-9) {
            ok = false;
            detail = "ari mismatch at trial " + std::to_string(trial);
        }
    }
    for (int trial = 0; trial < 100 && ok; ++trial) {
        const std::size_t n = 10 + rng() % 100;
        auto pred = random_labels(rng, n, 2 + static_cast<int>(rng() % 5));
        auto truth = random_labels(rng, n, 2 + static_cast<int>(rng() % 5));
        const double oracle = direct_nmi(pred, truth);
        if (oracle >= 0 && std::abs(nmi(pred, truth) - oracle) > 1e-9) {
            ok = false;
            detail = "nmi mismatch at trial " + std::to_string(trial);
        }
    }
    const double elapsed = now_seconds() - t0;
    if (ok && elapsed >= 10.0) {
        ok = false;
        detail = "runtime " + std::to_string(elapsed) + "s exceeds 10s";
    }
    if (ok)
        detail = "metric oracles agree on 300 instances in " +
                 std::to_string(elapsed).substr(0, 5) + "s";
    report(1, ok, detail);
}

void criterion_2() {
    Rng init_rng(1002);
    auto model = ClassifierModel::init(4, 3, 0, init_rng);
    std::mt19937_64 r(1003);
    Matrix feats(10, 4);
    std::normal_distribution<double> g;
    for (auto& v : feats.data) v = g(r);
    std::vector<BatchSample> batch;
    for (std::size_t i = 0; i < 10; ++i)
        batch.push_back({i, static_cast<int>(r() % 3), 0.2 + 0.1 * (r() % 8)});

    Gradients grads;
    {
        Rng rng(1004);
        lct_loss(model, feats, batch, 0.4, 2, rng, grads);
    }
    auto loss_at = [&](const ClassifierModel& m) {
        Gradients gg;
        Rng rng(1004);
        return lct_loss(m, feats, batch, 0.4, 2, rng, gg);
    };
    const double h = 1e-6;
    double worst = 0.0;
    auto check_tensor = [&](std::vector<double> ClassifierModel::* member,
                            const std::vector<double>& analytic) {
        for (std::size_t i = 0; i < analytic.size(); ++i) {
            ClassifierModel up = model, dn = model;
            (up.*member)[i] += h;
            (dn.*member)[i] -= h;
            const double numeric = (loss_at(up) - loss_at(dn)) / (2 * h);
            const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-8});
            worst = std::max(worst, std::abs(numeric - analytic[i]) / denom);
        }
    };
    check_tensor(&ClassifierModel::w1, grads.w1);
    check_tensor(&ClassifierModel::b1, grads.b1);
    report(2, worst < 1e-4,
           "max relative gradient error " + std::to_string(worst) + " (limit 1e-4)");
}

void criterion_3() {
    std::mt19937_64 rng(1005);
    bool ok = true;
    std::string detail = "1000 random schedules satisfy all ordering properties";
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        const int m = 2 + static_cast<int>(rng() % 9);
        const double beta0 = 0.005 + 0.095 * (rng() % 1000) / 1000.0;
        const int t = static_cast<int>(rng() % 301);
        WeightSchedule s{m, beta0, 0.0};
        if (group_weight(s, 1, t) != 1.0) {
            ok = false;
            detail = "w_1 != 1";
            break;
        }
        double prev = 1.0;
        for (int i = 2; i <= m; ++i) {
            const double w = group_weight(s, i, t);
            // decreasing in i and increasing in t; equality is allowed only
            // when the weight has saturated at 1.0 in double precision
            const bool dec_ok = w < prev || (w == prev && w == 1.0);
            if (!dec_ok || w < 0.0 || w > 1.0) {
                ok = false;
                detail = "ordering or range violated at i=" + std::to_string(i);
            }
            const double wt1 = group_weight(s, i, t + 1);
            // consecutive t values can land on the same representable double
            // once the weight is within rounding distance of 1
            const bool inc_ok = wt1 > w || (wt1 == w && 1.0 - w < 1e-9);
            if (!inc_ok) {
                ok = false;
                detail = "not increasing in t at i=" + std::to_string(i);
            }
            prev = w;
        }
    }
    report(3, ok, detail);
}

void criterion_4() {
    std::mt19937_64 rng(1006);
    bool ok = true;
    std::string detail = "500 random clusters: cover, targets, unanimity, determinism";
    for (int trial = 0; trial < 500 && ok; ++trial) {
        const std::size_t nc = 10 + rng() % 491;
        const std::size_t n_lists = 1 + rng() % 8;
        std::vector<std::int64_t> ids(nc);
        std::iota(ids.begin(), ids.end(), 0);
        SortedLists lists;
        lists.cluster_id = 0;
        lists.lists.assign(n_lists, ids);
        const bool unanimous = rng() % 4 == 0;
        std::vector<std::int64_t> shared = ids;
        std::shuffle(shared.begin(), shared.end(), rng);
        for (auto& l : lists.lists) {
            if (unanimous)
                l = shared;
            else
                std::shuffle(l.begin(), l.end(), rng);
        }
        const std::size_t m = 1 + rng() % 5;
        std::set<std::size_t> tset;
        while (tset.size() < m) tset.insert(1 + rng() % nc);
        std::vector<std::size_t> targets(tset.begin(), tset.end());

        auto rg = vote_groups(lists, targets);
        auto rg2 = vote_groups(lists, targets);
        if (rg.groups != rg2.groups || rg.residual != rg2.residual) {
            ok = false;
            detail = "nondeterministic output";
            break;
        }

        std::vector<std::int64_t> members;
        std::size_t cum = 0;
        for (std::size_t j = 0; j < rg.groups.size(); ++j) {
            cum += rg.groups[j].size();
            if (cum > targets[j]) {
                ok = false;
                detail = "cumulative target exceeded";
            }
            members.insert(members.end(), rg.groups[j].begin(), rg.groups[j].end());
        }
        members.insert(members.end(), rg.residual.begin(), rg.residual.end());
        std::set<std::int64_t> uniq(members.begin(), members.end());
        if (members.size() != nc || uniq.size() != nc) {
            ok = false;
            detail = "not a duplicate-free cover";
        }
        if (unanimous && ok) {
            std::size_t pos = 0;
            for (std::size_t j = 0; j < rg.groups.size() && ok; ++j) {
                for (auto id : rg.groups[j])
                    if (id != shared[pos++]) {
                        ok = false;
                        detail = "unanimous lists did not reduce to slicing";
                        break;
                    }
            }
        }
    }

    // thread-count determinism through the full per-cluster pipeline
    if (ok) {
        std::mt19937_64 r2(1007);
        EmbeddingSet set;
        const std::size_t n = 300;
        set.features = Matrix(n, 8);
        std::normal_distribution<double> g;
        for (auto& v : set.features.data) v = g(r2);
        set.assignments.resize(n);
        for (std::size_t i = 0; i < n; ++i) set.assignments[i] = static_cast<int>(i % 4);
        set.num_clusters = 4;
        set.sample_ids.resize(n);
        std::iota(set.sample_ids.begin(), set.sample_ids.end(), 0);
        RankingConfig cfg;
        auto a = rank_all(set, cfg, 0, 1);
        auto b = rank_all(set, cfg, 0, 8);
        for (std::size_t c = 0; c < a.size(); ++c)
            if (a[c].groups != b[c].groups || a[c].residual != b[c].residual) {
                ok = false;
                detail = "rank_all differs across thread counts";
            }
    }
    report(4, ok, detail);
}

void criterion_5() {
    const double t0 = now_seconds();
    const std::vector<double> ps = {0.2, 0.4, 0.6, 0.8};
    double mean_r02 = 0.0, mean_r08 = 0.0, mean_unranked = 0.0;
    int n_unranked = 0;
    const int n_seeds = 20;
    RankingConfig rcfg;

    for (int seed = 0; seed < n_seeds; ++seed) {
        auto set = generate(standard_benchmark(7000 + seed));
        auto groups = rank_all(set, rcfg, 0, 0);
        auto rep = evaluate(set.assignments, set.truth_labels,
                            ranked_orders(set, groups), ps);
        mean_r02 += rep.pooled_rsr.front().value;
        mean_r08 += rep.pooled_rsr.back().value;

        // unranked baseline: id order within each cluster (generation shuffle)
        std::vector<std::pair<int, std::vector<std::size_t>>> id_orders;
        for (int c = 0; c < set.num_clusters; ++c)
            id_orders.emplace_back(c, set.cluster_members(c));
        auto base = evaluate(set.assignments, set.truth_labels, id_orders, ps);
        for (const auto& pt : base.pooled_rsr) {
            mean_unranked += pt.value;
            ++n_unranked;
        }
    }
    mean_r02 /= n_seeds;
    mean_r08 /= n_seeds;
    mean_unranked /= n_unranked;
    const double elapsed = now_seconds() - t0;

    const bool ok = mean_r02 >= mean_r08 + 0.10 && mean_r02 >= 0.85 &&
                    std::abs(mean_unranked - 0.70) <= 0.03 && elapsed < 30.0;
    std::ostringstream os;
    os << "mean R_sr(0.2)=" << mean_r02 << " R_sr(0.8)=" << mean_r08
       << " unranked=" << mean_unranked << " in " << elapsed << "s";
    report(5, ok, os.str());
}

void criterion_6() {
    const double t0 = now_seconds();
    RankingConfig rcfg;
    int wins = 0;
    double mean_final = 0.0, mean_initial = 0.0;
    const int n_seeds = 5;
    for (int seed = 0; seed < n_seeds; ++seed) {
        auto set = generate(standard_benchmark(8000 + seed));
        mean_initial += hungarian_accuracy(set.assignments, set.truth_labels).acc;
        auto tcfg = standard_train_config(100 + seed);

        const auto icsr_run = train(set, rcfg, tcfg, TrainMode::icsr);
        const auto unweighted = train(set, rcfg, tcfg, TrainMode::baseline_unweighted);
        const auto topk = train(set, rcfg, tcfg, TrainMode::baseline_topk_only);

        const double a = icsr_run.history.back().acc;
        const double b = unweighted.history.back().acc;
        const double c = topk.history.back().acc;
        mean_final += a;
        if (a > b && a > c) ++wins;
    }
    mean_final /= n_seeds;
    mean_initial /= n_seeds;
    const double elapsed = now_seconds() - t0;
    const bool ok =
        mean_final >= mean_initial + 0.05 && wins >= 4 && elapsed < 300.0;
    std::ostringstream os;
    os << "final ACC " << mean_final << " vs initial " << mean_initial << ", beats both baselines on "
       << wins << "/5 seeds, " << elapsed << "s";
    report(6, ok, os.str());
}

void criterion_7() {
    RankingConfig rcfg;
    auto set = generate(standard_benchmark(9000));
    std::vector<double> finals;
    for (double beta0 : {0.01, 0.02, 0.05}) {
        auto tcfg = standard_train_config(500);
        tcfg.beta0 = beta0;
        finals.push_back(train(set, rcfg, tcfg, TrainMode::icsr).history.back().acc);
    }
    const double band =
        *std::max_element(finals.begin(), finals.end()) -
        *std::min_element(finals.begin(), finals.end());
    std::ostringstream os;
    os << "final ACC over beta0 sweep: " << finals[0] << " " << finals[1] << " "
       << finals[2] << " (band " << band << ", limit 0.02)";
    report(7, band <= 0.02, os.str());
}

void criterion_8() {
    RankingConfig cfg;
    std::mt19937_64 r(1010);
    std::normal_distribution<double> g;
    auto make_cluster = [&](std::size_t n) {
        EmbeddingSet s;
        s.features = Matrix(n, 16);
        for (auto& v : s.features.data) v = g(r);
        s.assignments.assign(n, 0);
        s.num_clusters = 1;
        s.sample_ids.resize(n);
        std::iota(s.sample_ids.begin(), s.sample_ids.end(), 0);
        return s;
    };
    auto time_one = [&](const EmbeddingSet& s) {
        double best = 1e300;
        for (int rep = 0; rep < 3; ++rep) {
            const double t0 = now_seconds();
            auto table = score_table(s, cfg, 0, 1);
            best = std::min(best, now_seconds() - t0);
            if (table.scores.data.empty()) std::abort();
        }
        return best;
    };
    const auto s1 = make_cluster(1000);
    const auto s2 = make_cluster(2000);
    const double t1 = time_one(s1);
    const double t2 = time_one(s2);
    const double ratio = t2 / t1;
    std::ostringstream os;
    os << "score_table time(2000)/time(1000) = " << ratio << " (band [3, 6])";
    report(8, ratio >= 3.0 && ratio <= 6.0, os.str());
}

void criterion_9(const std::string& cli) {
    bool ok = true;
    std::string detail = "round-trip byte-identical; corrupted header exits 2";
    const std::string path = "acceptance_gen.bin";

    const std::string cmd = cli +
                            " generate --k 3 --per-cluster 20 --dim 4 --seed 11 --out " +
                            path;
    if (std::system(cmd.c_str()) != 0) {
        report(9, false, "generate command failed");
        return;
    }
    auto set = read_embedding_file(path);
    const std::string path2 = "acceptance_gen2.bin";
    write_embedding_file(path2, set);
    auto slurp = [](const std::string& p) {
        std::ifstream f(p, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    if (slurp(path) != slurp(path2)) {
        ok = false;
        detail = "re-serialized file differs";
    }

    // corrupt the magic and expect exit code 2 with the field named
    auto bytes = slurp(path);
    bytes[1] = 'X';
    {
        std::ofstream f(path, std::ios::binary);
        f << bytes;
    }
    const std::string rank_cmd =
        cli + " rank " + path + " --out acceptance_rank.json 2> acceptance_err.txt";
    const int rc = std::system(rank_cmd.c_str());
    const int exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    if (exit_code != 2) {
        ok = false;
        detail = "corrupted file exit code " + std::to_string(exit_code) + ", want 2";
    } else {
        const std::string err = slurp("acceptance_err.txt");
        if (err.find("magic") == std::string::npos) {
            ok = false;
            detail = "error message does not name the offending field";
        }
    }
    std::remove(path.c_str());
    std::remove(path2.c_str());
    std::remove("acceptance_rank.json");
    std::remove("acceptance_err.txt");
    report(9, ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "./icsr";
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9(cli);
    std::cout << (g_failures == 0 ? "all criteria passed"
                                  : std::to_string(g_failures) + " criteria failed")
              << std::endl;
    return g_failures == 0 ? 0 : 1;
}
