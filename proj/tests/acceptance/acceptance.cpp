// Copyright 2026 The Coreset Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks AC1-AC11. Prints one [PASS]/[FAIL] line per criterion and
// exits non-zero if any fail.
//
//   acceptance --cli <path to coreset binary> --workdir <scratch dir> [--only AC7]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "coreset/bundle.hpp"
#include "coreset/evaluation.hpp"
#include "coreset/irt.hpp"
#include "coreset/kmeans.hpp"
#include "coreset/regression.hpp"
#include "coreset/selectors.hpp"
#include "coreset/stats.hpp"
#include "coreset/synth.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace coreset;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void expect(bool ok, const std::string& what) {
        if (!ok && pass) detail << "first failure: " << what << "; ";
        pass = pass && ok;
    }
};

struct Settings {
    std::string cli;
    fs::path workdir;
};

// --- AC1 -------------------------------------------------------------------

double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> oracle_ranks(const std::vector<double>& x) {
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double less = 0, equal = 0;
        for (double v : x) {
            less += v < x[i];
            equal += v == x[i];
        }
        r[i] = less + (equal + 1) / 2;
    }
    return r;
}

double oracle_kendall(const std::vector<double>& x, const std::vector<double>& y) {
    double c = 0, d = 0, tx = 0, ty = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double dx = x[i] - x[j], dy = y[i] - y[j];
            if (dx == 0 && dy == 0) continue;
            if (dx == 0) ++tx;
            else if (dy == 0) ++ty;
            else if ((dx > 0) == (dy > 0)) ++c;
            else ++d;
        }
    return (c - d) / std::sqrt((c + d + tx) * (c + d + ty));
}

void ac1(Outcome& o, const Settings&) {
    std::mt19937_64 gen(101);
    std::normal_distribution<double> z;
    std::uniform_int_distribution<int> coarse(0, 9);
    double worst = 0;
    for (int v = 0; v < 100; ++v) {
        std::vector<double> x(50), y(50);
        for (std::size_t i = 0; i < 50; ++i) {
            // Every other vector is coarse so ties are exercised.
            x[i] = v % 2 ? coarse(gen) : z(gen);
            y[i] = v % 2 ? coarse(gen) + 0.3 * x[i] : 0.5 * x[i] + z(gen);
        }
        worst = std::max({worst, std::abs(pearson(x, y).value - oracle_pearson(x, y)),
                          std::abs(spearman(x, y).value - oracle_pearson(oracle_ranks(x), oracle_ranks(y))),
                          std::abs(kendall(x, y).value - oracle_kendall(x, y))});
    }
    o.expect(worst <= 1e-10, "max |delta| vs oracle");
    const double k = kendall(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2}).value;
    o.expect(k == 1.0 / 3.0, "kendall (1,2,3)/(1,3,2) == 1/3");
    o.detail << "max |delta| = " << worst << ", kendall toy = " << k;
}

// --- AC2 -------------------------------------------------------------------

void ac2(Outcome& o, const Settings&) {
    std::mt19937_64 gen(202);
    std::uniform_int_distribution<int> nd(1, 200), dd(1, 10);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> uw(0.01, 1.0);
    std::size_t violations = 0, iterations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = nd(gen), d = dd(gen);
        const int k = std::uniform_int_distribution<int>(1, std::min(n, 50))(gen);
        Eigen::MatrixXd x(n, d);
        const bool coarse = trial % 3 == 0; // duplicated coordinates
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = coarse ? std::round(z(gen)) : z(gen);
        std::vector<double> w(static_cast<std::size_t>(n));
        for (auto& v : w) v = uw(gen);
        const auto r = weighted_kmeans(x, w, static_cast<std::size_t>(k), {static_cast<std::uint64_t>(trial)});
        for (std::size_t t = 1; t < r.objective_trace.size(); ++t) {
            ++iterations;
            // Relative slack of 1e-12 absorbs summation rounding only.
            if (r.objective_trace[t] > r.objective_trace[t - 1] * (1 + 1e-12) + 1e-300) ++violations;
        }
    }
    o.expect(violations == 0, "objective increased");

    std::size_t mismatches = 0;
    std::normal_distribution<double> blob(0.0, 0.4);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::MatrixXd x(6, 2);
        for (int j = 0; j < 6; ++j) x.row(j) << (j % 2 ? 3.0 : -3.0) + blob(gen), blob(gen);
        std::vector<double> w(6);
        for (auto& v : w) v = uw(gen);
        double best = std::numeric_limits<double>::infinity();
        int best_mask = 0;
        for (int mask = 1; mask < 63; ++mask) {
            double total = 0;
            for (int side = 0; side < 2; ++side) {
                Eigen::RowVector2d mu = Eigen::RowVector2d::Zero();
                double ws = 0;
                for (int j = 0; j < 6; ++j)
                    if (((mask >> j) & 1) == side) {
                        mu += w[static_cast<std::size_t>(j)] * x.row(j);
                        ws += w[static_cast<std::size_t>(j)];
                    }
                mu /= ws;
                for (int j = 0; j < 6; ++j)
                    if (((mask >> j) & 1) == side) total += w[static_cast<std::size_t>(j)] * (x.row(j) - mu).squaredNorm();
            }
            if (total < best) {
                best = total;
                best_mask = mask;
            }
        }
        const auto r = weighted_kmeans(x, w, 2, {static_cast<std::uint64_t>(trial)});
        bool same = std::abs(r.objective - best) <= 1e-12 * (1 + best);
        for (int i = 0; i < 6; ++i)
            for (int j = i + 1; j < 6; ++j)
                same = same && ((r.assignments[static_cast<std::size_t>(i)] == r.assignments[static_cast<std::size_t>(j)]) ==
                                (((best_mask >> i) & 1) == ((best_mask >> j) & 1)));
        mismatches += !same;
    }
    o.expect(mismatches == 0, "two-blob partition differs from oracle");
    o.detail << "1000 instances, " << iterations << " iterations, " << violations << " increases; two-blob mismatches "
             << mismatches << "/200";
}

// --- AC3 -------------------------------------------------------------------

void ac3(Outcome& o, const Settings&) {
    int good = 0;
    std::ostringstream rhos;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SynthConfig c;
        c.models = 30;
        c.tasks = 4;
        c.items_per_task = 50;
        c.latent_dim = 2;
        c.seed = seed;
        const auto data = gen_m2pl_dataset(c);
        M2plOptions opt;
        opt.dim = 2;
        opt.seed = seed;
        const auto fit = fit_m2pl(data.responses, opt);
        const auto& bh = fit.params.beta;
        const auto& bt = data.truth.params.beta;
        const double rho = spearman(std::span<const double>(bh.data(), static_cast<std::size_t>(bh.size())),
                                    std::span<const double>(bt.data(), static_cast<std::size_t>(bt.size())))
                               .value;
        good += rho >= 0.8;
        rhos << (seed > 1 ? ", " : "") << std::fixed << std::setprecision(3) << rho;
    }
    o.expect(good >= 4, "Spearman >= 0.8 in >= 4/5 seeds");

    std::mt19937_64 gen(303);
    std::normal_distribution<double> z;
    std::bernoulli_distribution coin(0.5);
    M2plParams p{Eigen::MatrixXd(8, 2), Eigen::VectorXd(8), Eigen::MatrixXd(5, 2)};
    for (auto* m : {&p.alpha, &p.theta})
        for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = z(gen);
    for (Eigen::Index i = 0; i < 8; ++i) p.beta(i) = z(gen);
    Eigen::MatrixXd y(5, 8);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = coin(gen) ? 1.0 : 0.0;
    const auto g = m2pl_gradient(y, p);
    double worst = 0;
    auto check = [&](double* param, double analytic) {
        const double keep = *param, h = 1e-5;
        *param = keep + h;
        const double up = m2pl_log_posterior(y, p);
        *param = keep - h;
        const double down = m2pl_log_posterior(y, p);
        *param = keep;
        const double fd = (up - down) / (2 * h);
        worst = std::max(worst, std::abs(analytic - fd) / std::max(1.0, std::abs(fd)));
    };
    for (Eigen::Index i = 0; i < p.alpha.size(); ++i) check(p.alpha.data() + i, g.alpha.data()[i]);
    for (Eigen::Index i = 0; i < p.beta.size(); ++i) check(p.beta.data() + i, g.beta.data()[i]);
    for (Eigen::Index i = 0; i < p.theta.size(); ++i) check(p.theta.data() + i, g.theta.data()[i]);
    o.expect(worst <= 1e-5, "gradient vs finite differences");
    o.detail << "Spearman(beta) per seed = [" << rhos.str() << "], " << good << "/5 >= 0.8; gradient rel err " << worst;
}

// --- AC4 -------------------------------------------------------------------

void ac4(Outcome& o, const Settings&) {
    std::mt19937_64 gen(404);
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = fixtures::random_matrix(gen, 6, fixtures::random_task_sizes(gen, 6, 12));
        if (m.num_items() < 2) continue;
        const auto b = binarize(m);
        M2plOptions opt;
        opt.dim = 2;
        opt.epochs = 100;
        opt.seed = static_cast<std::uint64_t>(trial);
        const auto model = fit_m2pl(b, opt);
        SubsetSpec all{"irt_anchor", m.num_items(), 0, {}};
        for (const auto& it : m.items()) all.entries.push_back({it.item_id, 1.0 / static_cast<double>(m.num_items())});
        const auto pred = pirt_predict(m, all, model);
        const auto ref = reference_scores(m.with_values(b.y));
        for (std::size_t k = 0; k < pred.size(); ++k) worst = std::max(worst, std::abs(pred[k] - ref[k]));
    }
    o.expect(worst <= 1e-9, "p-IRT vs binarized reference");
    o.detail << "20 pools, max |delta| = " << worst;
}

// --- AC5 -------------------------------------------------------------------

void ac5(Outcome& o, const Settings&) {
    std::mt19937_64 gen(505);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> z;
    auto uniform = [&](Eigen::Index r, Eigen::Index c) {
        Eigen::MatrixXd x(r, c);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(gen);
        return x;
    };
    double worst_stationarity = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index m = 2 + trial % 30, n = 1 + trial % 12;
        const Eigen::MatrixXd x = uniform(m, n);
        Eigen::VectorXd y(m);
        for (Eigen::Index i = 0; i < m; ++i) y(i) = z(gen);
        const double lambda = std::pow(10.0, trial % 7 - 3);
        const auto fit = ridge_fit(x, y, lambda);
        const Eigen::VectorXd r = y - fit.predict(x);
        const double scale = 1 + x.norm() * y.norm();
        worst_stationarity = std::max(worst_stationarity, (x.transpose() * r - lambda * fit.weights).norm() / scale);
    }
    o.expect(worst_stationarity <= 1e-8, "normal-equation residual identity");

    const Eigen::MatrixXd x = uniform(40, 5);
    Eigen::VectorXd w(5);
    w << 0.5, -1.0, 2.0, 0.0, 0.25;
    const Eigen::VectorXd y = (x * w).array() + 0.1;
    const auto exact = ridge_fit(x, y, 1e-4);
    const double mse = (exact.predict(x) - y).squaredNorm() / 40;
    o.expect(mse <= 1e-6, "exact-linear training MSE");

    const auto flat = ridge_fit(x, y, 1e9);
    const double collapse = (flat.predict(x).array() - y.mean()).abs().maxCoeff();
    o.expect(collapse <= 1e-3, "lambda=1e9 collapse to mean");
    o.detail << "max stationarity residual/scale = " << worst_stationarity << ", exact-linear MSE = " << mse
             << ", |pred - mean| at 1e9 = " << collapse;
}

// --- AC6 -------------------------------------------------------------------

void ac6(Outcome& o, const Settings& s) {
    SynthConfig c;
    c.models = 12;
    c.tasks = 6;
    c.items_per_task = 10;
    c.rated_models = 7;
    c.seed = 606;
    const auto dir = s.workdir / "ac6";
    fs::remove_all(dir);
    write_pool(dir, gen_pool(c));
    const auto ratings = load_ratings((dir / PoolFiles::ratings).string());
    const auto m = load_pool((dir / PoolFiles::items).string(), (dir / PoolFiles::scores).string(),
                             (dir / PoolFiles::norm).string());
    const auto subset = select_random_balanced(m, 12, 6);
    const auto x = preference_features(m, subset, ratings);
    const Eigen::VectorXd y = ratings.column("overall");

    const auto lomo = preference_lomo(x, y);
    o.expect(ratings.model_ids.size() == 7, "ratings file has 7 models");
    o.expect(lomo.folds.size() == 7, "7 LOMO folds");
    std::vector<double> grid;
    for (int e = -4; e <= 4; ++e) grid.push_back(std::pow(10.0, e));
    bool grid_ok = lomo.grid.size() == 9;
    for (std::size_t i = 0; grid_ok && i < 9; ++i) grid_ok = std::abs(lomo.grid[i] / grid[i] - 1) <= 1e-15;
    o.expect(grid_ok, "9-value lambda grid 1e-4..1e4");
    for (const auto& f : lomo.folds)
        o.expect(std::find(lomo.grid.begin(), lomo.grid.end(), f.lambda) != lomo.grid.end(), "fold lambda in grid");

    const Eigen::VectorXd base = Eigen::Map<const Eigen::VectorXd>(reference_scores(m.select_models(std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6})).data(), 7);
    const auto pw = pairwise_52(x, y, preference_lambda_grid(), base);
    o.expect(pw.pairs.size() == 21, "21 pairs");
    std::set<std::pair<std::size_t, std::size_t>> distinct;
    std::size_t correct = 0;
    for (const auto& p : pw.pairs) {
        distinct.insert({p.first, p.second});
        const bool ok = p.predicted_first != p.predicted_second && y(static_cast<Eigen::Index>(p.first)) != y(static_cast<Eigen::Index>(p.second)) &&
                        (p.predicted_first > p.predicted_second) == (y(static_cast<Eigen::Index>(p.first)) > y(static_cast<Eigen::Index>(p.second)));
        correct += ok;
    }
    o.expect(distinct.size() == 21, "pairs distinct");
    o.expect(pw.accuracy && *pw.accuracy == static_cast<double>(correct) / 21.0, "accuracy equals recount");
    o.detail << "folds = " << lomo.folds.size() << ", grid size = " << lomo.grid.size() << ", pairs = " << pw.pairs.size()
             << ", accuracy = " << *pw.accuracy << " (recount " << correct << "/21)";
}

// --- AC7 -------------------------------------------------------------------

void ac7(Outcome& o, const Settings&) {
    SynthConfig c; // K=24, T=20, 50 items/task, noise 0.5
    c.seed = 707;
    const auto pool = gen_pool(c);
    const auto& m = pool.benchmark.matrix;
    const EmbeddingSources emb{pool.semantic, pool.acoustic};
    CrossvalOptions opt;
    opt.folds = 3;
    opt.repeats = 100;
    opt.seed = 7070;

    auto mean_r = [&](Method method, std::size_t n) {
        SelectorConfig cfg;
        cfg.method = method;
        CrossvalOptions o2 = opt;
        o2.sizes = {n};
        const auto curve = crossval_curve(m, cfg, o2, emb);
        return curve.points[0];
    };
    const auto anchor = mean_r(Method::anchor_points, 20);
    const auto random = mean_r(Method::random_balanced, 20);
    const auto combined = mean_r(Method::combined_anchor, 50);
    o.expect(anchor.values.size() == 300, "300 evaluations per size");
    o.expect(anchor.mean >= random.mean - 0.02, "anchor_points(20) >= random_balanced(20) - 0.02");
    o.expect(combined.mean >= 0.85, "combined_anchor(50) >= 0.85");
    o.detail << std::fixed << std::setprecision(4) << "anchor_points@20 = " << anchor.mean << " +/- " << anchor.sem
             << ", random_balanced@20 = " << random.mean << " +/- " << random.sem << ", combined_anchor@50 = "
             << combined.mean << " +/- " << combined.sem;
}

// --- AC8 -------------------------------------------------------------------

void ac8(Outcome& o, const Settings&) {
    SynthConfig c;
    c.seed = 808;
    const auto m = gen_benchmark(c).matrix;
    const auto diff = item_difficulty(m);
    std::vector<std::size_t> all(m.num_items());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto bins = difficulty_bins(m, all, diff, 10);
    std::vector<std::size_t> bin_of(m.num_items());
    for (std::size_t b = 0; b < bins.size(); ++b)
        for (auto i : bins[b]) bin_of[i] = b;

    std::size_t bad30 = 0, bad25 = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        for (std::size_t n : {30u, 25u}) {
            const auto s = select_difficulty_stratified(m, n, 10, seed);
            std::set<std::string> ids;
            std::vector<std::size_t> per(10, 0);
            for (const auto& e : s.entries) {
                ids.insert(e.item_id);
                ++per[bin_of[m.require_item(e.item_id)]];
            }
            bool ok = ids.size() == n && s.entries.size() == n;
            std::size_t extra = 0;
            for (auto p : per) {
                if (n == 30) ok = ok && p == 3;
                else {
                    ok = ok && p >= 2;
                    extra += p - 2;
                }
            }
            if (n == 25) ok = ok && extra == 5;
            (n == 30 ? bad30 : bad25) += !ok;
        }
    }
    o.expect(bad30 == 0, "n=30 gives 3 per bin");
    o.expect(bad25 == 0, "n=25 gives 2 per bin plus 5");
    o.detail << "100 seeds; n=30 failures " << bad30 << ", n=25 failures " << bad25;
}

// --- AC9 -------------------------------------------------------------------

void ac9(Outcome& o, const Settings&) {
    const auto wer = NormalizationRule::capped_error(1.0);
    const auto latency = NormalizationRule::capped_error(5.0);
    const auto gpt = NormalizationRule::affine(1.0, 10.0);
    const auto utmos = NormalizationRule::affine(1.0, 5.0);
    const auto acc = NormalizationRule::identity();
    o.expect(std::abs(normalize(0.3, wer) - 0.7) <= 1e-15, "WER 0.3 -> 0.7");
    o.expect(normalize(6.0, latency) == 0.0, "latency 6 s -> 0");
    o.expect(normalize(10.0, gpt) == 1.0, "GPT-score 10 -> 1");
    o.expect(normalize(3.0, utmos) == 0.5, "UTMOS 3 -> 0.5");

    std::mt19937_64 gen(909);
    std::uniform_real_distribution<double> u(-5.0, 20.0);
    std::size_t outside = 0, non_monotone = 0;
    const NormalizationRule* rules[] = {&wer, &latency, &gpt, &utmos};
    for (int t = 0; t < 100000; ++t) {
        double a = u(gen), b = u(gen);
        if (a > b) std::swap(a, b);
        for (const auto* r : rules) {
            if (r->kind == NormalizationRule::Kind::one_minus_capped_error && a < 0) continue; // rejected input
            const double na = normalize(a, *r), nb = normalize(b, *r);
            outside += na < 0 || na > 1 || nb < 0 || nb > 1;
            // Error metrics decrease in the raw value; scale metrics increase.
            non_monotone += r->kind == NormalizationRule::Kind::one_minus_capped_error ? na < nb : na > nb;
        }
        const double p = std::abs(a) / 20.0;
        if (p <= 1) outside += normalize(p, acc) != p;
    }
    o.expect(outside == 0, "values in [0,1]");
    o.expect(non_monotone == 0, "monotone direction");
    bool rejects = false;
    try {
        normalize(1.5, acc);
    } catch (const ValidationError&) {
        rejects = true;
    }
    o.expect(rejects, "identity rejects values outside [0,1]");
    o.detail << "spot values ok; 100000 random raws, " << outside << " outside [0,1], " << non_monotone << " order flips";
}

// --- AC10 ------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path g_log; // CLI output from AC10, kept out of the test log

bool run(const std::string& cmd, Outcome& o) {
    const int rc = std::system((cmd + " >> \"" + g_log.string() + "\" 2>&1").c_str());
    o.expect(rc == 0, "command failed (see " + g_log.string() + "): " + cmd);
    return rc == 0;
}

bool pipeline(const Settings& s, const fs::path& d, Outcome& o) {
    fs::remove_all(d);
    fs::create_directories(d);
    const std::string cli = "\"" + s.cli + "\"";
    const std::string q = "\"" + d.string() + "/";
    const std::string pool = q + "pool/";
    return run(cli + " synth --out " + q + "pool\" --seed 1010 --models 12 --tasks 6 --items-per-task 12", o) &&
           run(cli + " ingest --items " + pool + "items.csv\" --scores " + pool + "scores.csv\" --norm " + pool +
                   "norm.json\" --semantic " + pool + "semantic.csv\" --acoustic " + pool + "acoustic.csv\" --out " + q +
                   "bundle.json\"",
               o) &&
           run(cli + " select --bundle " + q + "bundle.json\" --method anchor_points --n 15 --seed 3 --out " + q +
                   "selection.json\"",
               o) &&
           run(cli + " select --bundle " + q + "bundle.json\" --method random_search_learn --n 10 --seed 3 "
                     "--search-iterations 20 --out " + q + "learn.json\"",
               o) &&
           run(cli + " evaluate --bundle " + q + "bundle.json\" --methods random_balanced,anchor_points,combined_anchor "
                     "--sizes 5,10,20 --repeats 4 --seed 11 --jobs 1 --out-json " + q + "eval.json\" --out-csv " + q +
                   "eval.csv\" --out-summary " + q + "summary.csv\"",
               o) &&
           run(cli + " regress --bundle " + q + "bundle.json\" --subset " + q + "selection.json\" --ratings " + pool +
                   "ratings.csv\" --protocol lomo --dimension overall --out " + q + "lomo.json\"",
               o) &&
           run(cli + " regress --bundle " + q + "bundle.json\" --subset " + q + "selection.json\" --ratings " + pool +
                   "ratings.csv\" --protocol pairwise52 --baseline apw --dimension quality --out " + q + "pairwise.json\"",
               o) &&
           run(cli + " export --bundle " + q + "bundle.json\" --subset " + q + "selection.json\" --ratings " + pool +
                   "ratings.csv\" --out " + q + "release.json\"",
               o);
}

void ac10(Outcome& o, const Settings& s) {
    const auto a = s.workdir / "ac10_run1", b = s.workdir / "ac10_run2";
    if (!pipeline(s, a, o) || !pipeline(s, b, o)) return;
    std::size_t files = 0, differing = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), a);
        ++files;
        if (!fs::exists(b / rel) || slurp(e.path()) != slurp(b / rel)) {
            ++differing;
            o.expect(false, "differs: " + rel.string());
        }
    }
    o.expect(files >= 20, "pipeline wrote its outputs");

    const std::string cli = "\"" + s.cli + "\"";
    const std::string q = "\"" + a.string() + "/";
    run(cli + " evaluate --bundle " + q + "bundle.json\" --methods random_balanced,anchor_points,combined_anchor "
              "--sizes 5,10,20 --repeats 4 --seed 11 --jobs 3 --out-json " + q + "eval_j3.json\" --out-csv " + q +
            "eval_j3.csv\" --out-summary " + q + "summary_j3.csv\"",
        o);
    const bool jobs_same = slurp(a / "eval.json") == slurp(a / "eval_j3.json") && slurp(a / "eval.csv") == slurp(a / "eval_j3.csv") &&
                           slurp(a / "summary.csv") == slurp(a / "summary_j3.csv");
    o.expect(jobs_same, "evaluate --jobs 1 vs --jobs 3");
    o.detail << files << " files compared across two runs, " << differing << " differ; --jobs 1 vs 3 "
             << (jobs_same ? "identical" : "DIFFERENT");
}

// --- AC11 ------------------------------------------------------------------

void ac11(Outcome& o, const Settings&) {
    auto curve = [](std::vector<std::pair<std::size_t, double>> pts) {
        CorrelationCurve c{"toy", CorrelationMetric::pearson, {}};
        for (auto [n, r] : pts) c.points.push_back(summarize_point(n, {r}));
        return c;
    };
    const double a1 = aucc(curve({{10, 0.5}, {200, 1.0}}));
    const double a2 = aucc(curve({{10, 0.0}, {105, 1.0}, {200, 0.0}}));
    const double a3 = aucc(curve({{10, 0.9}, {50, 0.9}, {200, 0.9}}));
    o.expect(std::abs(a1 - 0.75) <= 1e-15, "(10,0.5),(200,1.0) -> 0.75");
    o.expect(std::abs(a2 - 0.5) <= 1e-15, "triangle -> 0.5");
    o.expect(std::abs(a3 - 0.9) <= 1e-15, "constant -> 0.9");

    const auto c = curve({{10, 0.8}, {50, 0.92}, {100, 0.96}});
    o.expect(n_threshold(c, 0.90) == std::optional<std::size_t>(50), "n90 = 50");
    o.expect(!n_threshold(c, 0.99).has_value(), "unreached -> absent");
    o.expect(n_threshold(curve({{10, 0.95}, {20, 0.85}, {30, 0.96}}), 0.9) == std::optional<std::size_t>(10),
             "first crossing on a non-monotone curve");

    EvalReport rep;
    rep.curves.push_back(c);
    rep.summaries.push_back(summarize_curve(c));
    std::ostringstream csv;
    write_summary_csv(csv, rep);
    const std::string text = csv.str();
    o.expect(text.find("toy,pearson,") != std::string::npos && text.find(",50,100\n") != std::string::npos,
             "summary row rendered");
    auto low = curve({{10, 0.5}, {200, 0.6}});
    rep.summaries = {summarize_curve(low)};
    std::ostringstream csv2;
    write_summary_csv(csv2, rep);
    o.expect(csv2.str().find(",--,--\n") != std::string::npos, "unreached thresholds render as --");
    o.expect(to_json(rep)["summary"][0]["n90"].is_null(), "JSON null for unreached");
    o.detail << "aucc = " << a1 << ", " << a2 << ", " << a3 << "; summary row: "
             << csv2.str().substr(csv2.str().find('\n') + 1, csv2.str().size() - csv2.str().find('\n') - 2);
}

struct Criterion {
    const char* id;
    const char* title;
    double budget_s; // 0 = no runtime bound
    std::function<void(Outcome&, const Settings&)> fn;
};

} // namespace

int main(int argc, char** argv) {
    Settings s;
    std::string only;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string k = argv[i];
        if (k == "--cli") s.cli = argv[i + 1];
        else if (k == "--workdir") s.workdir = argv[i + 1];
        else if (k == "--only") only = argv[i + 1];
    }
    if (s.cli.empty() || s.workdir.empty()) {
        std::cerr << "usage: acceptance --cli PATH --workdir DIR [--only ACn]\n";
        return 2;
    }
    s.cli = fs::absolute(s.cli).string();
    s.workdir = fs::absolute(s.workdir);
    fs::create_directories(s.workdir);
    g_log = s.workdir / "cli.log";
    fs::remove(g_log);

    const std::vector<Criterion> criteria{
        {"AC1", "correlation oracle equivalence", 5, ac1},
        {"AC2", "weighted k-means monotonicity and two-blob oracle", 60, ac2},
        {"AC3", "IRT recovery and gradient check", 120, ac3},
        {"AC4", "p-IRT exactness on the full pool", 0, ac4},
        {"AC5", "ridge correctness", 0, ac5},
        {"AC6", "LOMO and 5-2 protocol structure", 0, ac6},
        {"AC7", "selector quality on the synthetic benchmark", 600, ac7},
        {"AC8", "difficulty stratification exactness", 0, ac8},
        {"AC9", "normalization table", 0, ac9},
        {"AC10", "end-to-end determinism", 0, ac10},
        {"AC11", "AUCC and N-threshold", 0, ac11},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && only != c.id) continue;
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.fn(o, s);
        } catch (const std::exception& e) {
            o.expect(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_s > 0) o.expect(secs < c.budget_s, "runtime budget");
        failed += !o.pass;
        std::printf("[%s] %s %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs, o.detail.str().c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
