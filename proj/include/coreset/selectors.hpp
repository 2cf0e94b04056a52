// Copyright 2026 The Coreset Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Subset selection methods. Every selector is a pure function of
// (inputs, config, seed) and returns exactly n distinct items with weights
// summing to one.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coreset/data_model.hpp"
#include "coreset/embeddings.hpp"
#include "coreset/irt.hpp"
#include "coreset/kmeans.hpp"
#include "coreset/parallel.hpp"
#include "coreset/regression.hpp"
#include "coreset/rng.hpp"
#include "coreset/weighting.hpp"

namespace coreset {

// --- sampling primitives ----------------------------------------------------

/// Draws n distinct indices with inclusion probability proportional to `mass`
/// (capped at 1, excess redistributed) using randomized systematic sampling.
/// Unlike sequential draw-and-remove, inclusion probabilities are exact, so
/// expected per-group counts follow the mass. Returns ascending indices.
inline std::vector<std::size_t> pps_sample(std::span<const double> mass, std::size_t n, Rng& rng) {
    std::size_t positive = 0;
    for (double m : mass) {
        detail::require(std::isfinite(m) && m >= 0.0, "pps_sample: mass must be finite and >= 0");
        positive += m > 0.0;
    }
    detail::require(n <= positive, "pps_sample: cannot draw " + std::to_string(n) + " items from " +
                                       std::to_string(positive) + " candidates");
    if (n == 0) return {};

    std::vector<double> pi(mass.size(), 0.0);
    std::vector<bool> capped(mass.size(), false);
    for (;;) {
        std::size_t n_capped = 0;
        std::vector<double> free_mass;
        for (std::size_t i = 0; i < mass.size(); ++i) {
            if (capped[i]) ++n_capped;
            else free_mass.push_back(mass[i]);
        }
        const double total = accurate_sum(free_mass);
        const double scale = static_cast<double>(n - n_capped) / total;
        bool changed = false;
        for (std::size_t i = 0; i < mass.size(); ++i) {
            if (capped[i]) {
                pi[i] = 1.0;
            } else {
                pi[i] = mass[i] * scale;
                if (pi[i] >= 1.0) {
                    capped[i] = true;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }

    std::vector<std::size_t> order(mass.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    const double u = rng.uniform();
    std::vector<std::size_t> out;
    out.reserve(n);
    double cum = 0.0;
    for (std::size_t t = 0; t < order.size(); ++t) {
        const double prev = cum;
        cum = (t + 1 == order.size()) ? static_cast<double>(n) : cum + pi[order[t]];
        if (pi[order[t]] > 0.0 && std::floor(cum - u) > std::floor(prev - u)) out.push_back(order[t]);
    }
    if (out.size() != n) {
        // Cumulative rounding: fix up by inclusion probability.
        std::vector<std::size_t> by_pi(order);
        std::stable_sort(by_pi.begin(), by_pi.end(), [&](auto a, auto b) { return pi[a] > pi[b]; });
        std::vector<bool> in(mass.size(), false);
        for (auto i : out) in[i] = true;
        while (out.size() > n) {
            auto it = std::find_if(by_pi.rbegin(), by_pi.rend(), [&](auto i) { return in[i]; });
            in[*it] = false;
            out.erase(std::find(out.begin(), out.end(), *it));
        }
        for (auto i : by_pi) {
            if (out.size() == n) break;
            if (!in[i] && pi[i] > 0.0) {
                in[i] = true;
                out.push_back(i);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Rank of each item by item_id (used for deterministic tie-breaking).
inline std::vector<std::size_t> item_id_ranks(const ScoreMatrix& m) {
    std::vector<std::size_t> order(m.num_items());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return m.items()[a].item_id < m.items()[b].item_id; });
    std::vector<std::size_t> rank(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
    return rank;
}

inline SubsetSpec uniform_subset(const ScoreMatrix& m, std::string method, std::span<const std::size_t> items,
                                 std::uint64_t seed) {
    SubsetSpec s{std::move(method), items.size(), seed, {}};
    const double w = 1.0 / static_cast<double>(items.size());
    for (auto i : items) s.entries.push_back({m.items()[i].item_id, w});
    return s;
}

namespace detail {

inline void check_size(std::size_t n, const ScoreMatrix& m) {
    require(n >= 1, "subset size must be positive");
    require(n <= m.num_items(), "subset size " + std::to_string(n) + " exceeds pool size " + std::to_string(m.num_items()));
}

} // namespace detail

// --- baseline and heuristic selectors ----------------------------------------

inline std::vector<std::size_t> task_balanced_draw(const ScoreMatrix& m, std::size_t n, Rng& rng) {
    const auto b = balance_weights(m);
    return pps_sample(b, n, rng);
}

/// Task-balanced random sample: inclusion probability proportional to
/// 1 / (T * |T_t|), uniform weights.
inline SubsetSpec select_random_balanced(const ScoreMatrix& m, std::size_t n, std::uint64_t seed) {
    detail::check_size(n, m);
    Rng rng(seed);
    return uniform_subset(m, "random_balanced", task_balanced_draw(m, n, rng), seed);
}

/// Sample variance (K - 1 denominator) of each item's scores across models.
/// Values are summed in sorted order so the result is independent of model order.
inline std::vector<double> item_variances(const ScoreMatrix& m) {
    const auto k = m.num_models();
    detail::require(k >= 2, "item variance needs at least 2 models");
    std::vector<double> out(m.num_items()), col(k), dev(k);
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t r = 0; r < k; ++r) col[r] = m.score(r, i);
        std::sort(col.begin(), col.end());
        if (col.front() == col.back()) { // exact zero, so constant items tie
            out[i] = 0.0;
            continue;
        }
        const double mean = accurate_sum(col) / static_cast<double>(k);
        for (std::size_t r = 0; r < k; ++r) dev[r] = (col[r] - mean) * (col[r] - mean);
        std::sort(dev.begin(), dev.end());
        out[i] = accurate_sum(dev) / static_cast<double>(k - 1);
    }
    return out;
}

/// Top-n items by variance across models, globally; ties by item_id.
inline SubsetSpec select_variance_top(const ScoreMatrix& m, std::size_t n) {
    detail::check_size(n, m);
    const auto var = item_variances(m);
    std::vector<std::size_t> order(m.num_items());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
        if (var[a] != var[b]) return var[a] > var[b];
        return m.items()[a].item_id < m.items()[b].item_id;
    });
    order.resize(n);
    return uniform_subset(m, "variance_top", order, 0);
}

/// D_i = 1 - mean score across models.
inline std::vector<double> item_difficulty(const ScoreMatrix& m) {
    std::vector<double> d(m.num_items()), col(m.num_models());
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t r = 0; r < col.size(); ++r) col[r] = m.score(r, i);
        std::sort(col.begin(), col.end());
        d[i] = 1.0 - accurate_sum(col) / static_cast<double>(col.size());
    }
    return d;
}

/// Equal-count quantile bins over `items` ordered by (difficulty, item_id);
/// bin b holds positions [floor(b*M/B), floor((b+1)*M/B)). Bin 0 is easiest.
inline std::vector<std::vector<std::size_t>> difficulty_bins(const ScoreMatrix& m, std::vector<std::size_t> items,
                                                             const std::vector<double>& difficulty, std::size_t bins) {
    detail::require(bins >= 1, "difficulty bins: B must be >= 1");
    std::sort(items.begin(), items.end(), [&](auto a, auto b) {
        if (difficulty[a] != difficulty[b]) return difficulty[a] < difficulty[b];
        return m.items()[a].item_id < m.items()[b].item_id;
    });
    std::vector<std::vector<std::size_t>> out(bins);
    const std::size_t total = items.size();
    for (std::size_t b = 0; b < bins; ++b) {
        const std::size_t lo = b * total / bins, hi = (b + 1) * total / bins;
        out[b].assign(items.begin() + static_cast<std::ptrdiff_t>(lo), items.begin() + static_cast<std::ptrdiff_t>(hi));
    }
    return out;
}

/// Per-bin quotas: `each` per bin, with any shortfall spilled to the nearest
/// bin (by index, lower first) that still has unused items.
inline std::vector<std::size_t> spill_quotas(const std::vector<std::vector<std::size_t>>& bins, std::size_t each) {
    const std::size_t nb = bins.size();
    std::vector<std::size_t> quota(nb);
    std::size_t deficit = 0;
    std::vector<std::size_t> owed(nb, 0);
    for (std::size_t b = 0; b < nb; ++b) {
        quota[b] = std::min(each, bins[b].size());
        owed[b] = each - quota[b];
        deficit += owed[b];
    }
    for (std::size_t b = 0; b < nb && deficit; ++b) {
        while (owed[b] > 0) {
            std::optional<std::size_t> target;
            for (std::size_t dist = 1; dist < nb && !target; ++dist) {
                if (b >= dist && quota[b - dist] < bins[b - dist].size()) target = b - dist;
                else if (b + dist < nb && quota[b + dist] < bins[b + dist].size()) target = b + dist;
            }
            if (!target) detail::fail("difficulty_stratified: not enough items to meet quota");
            ++quota[*target];
            --owed[b];
            --deficit;
        }
    }
    return quota;
}

/// Two-phase difficulty-stratified sampling: floor(n/B) items from each of B
/// quantile bins, then one item from each of r = n mod B re-bins of the
/// remaining items. Draws within a bin use task-balanced probabilities 1/|T_t|.
inline SubsetSpec select_difficulty_stratified(const ScoreMatrix& m, std::size_t n, std::size_t bins,
                                               std::uint64_t seed) {
    detail::check_size(n, m);
    detail::require(bins >= 1, "difficulty_stratified: B must be >= 1");
    Rng rng(seed);
    const auto diff = item_difficulty(m);
    std::vector<double> task_mass(m.num_items());
    for (const auto& t : m.tasks())
        for (auto i : t.items) task_mass[i] = 1.0 / static_cast<double>(t.items.size());

    auto draw_from = [&](const std::vector<std::size_t>& bin, std::size_t count) {
        std::vector<double> mass(bin.size());
        for (std::size_t j = 0; j < bin.size(); ++j) mass[j] = task_mass[bin[j]];
        std::vector<std::size_t> picked;
        for (auto j : pps_sample(mass, count, rng)) picked.push_back(bin[j]);
        return picked;
    };

    std::vector<std::size_t> all(m.num_items());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto phase1 = difficulty_bins(m, all, diff, bins);
    const auto quota = spill_quotas(phase1, n / bins);
    std::vector<bool> taken(m.num_items(), false);
    std::vector<std::size_t> chosen;
    for (std::size_t b = 0; b < bins; ++b) {
        for (auto i : draw_from(phase1[b], quota[b])) {
            taken[i] = true;
            chosen.push_back(i);
        }
    }
    const std::size_t r = n % bins;
    if (r > 0) {
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < taken.size(); ++i)
            if (!taken[i]) rest.push_back(i);
        const auto phase2 = difficulty_bins(m, rest, diff, std::min(r, bins));
        for (std::size_t b = 0; b < r; ++b) {
            for (auto i : draw_from(phase2[b], 1)) chosen.push_back(i);
        }
    }
    std::sort(chosen.begin(), chosen.end());
    return uniform_subset(m, "difficulty_stratified", chosen, seed);
}

// --- anchor selectors --------------------------------------------------------

/// Weighted k-means (k = n) on `points` with balance weights; returns the
/// anchor of each cluster weighted by the cluster's total balance weight.
inline SubsetSpec select_anchor_points(const Eigen::MatrixXd& points, const ScoreMatrix& m, std::size_t n,
                                       std::uint64_t seed, std::string method = "anchor_points",
                                       int max_iterations = 300, ClusterResult* clusters = nullptr) {
    detail::check_size(n, m);
    detail::require(points.rows() == static_cast<Eigen::Index>(m.num_items()), "anchor selection: embedding row count mismatch");
    const auto b = balance_weights(m);
    const auto rank = item_id_ranks(m);
    KMeansOptions opt;
    opt.seed = seed;
    opt.max_iterations = max_iterations;
    opt.tie_rank = rank;
    auto res = weighted_kmeans(points, b, n, opt);
    SubsetSpec s{std::move(method), n, seed, {}};
    for (std::size_t c = 0; c < n; ++c) s.entries.push_back({m.items()[res.anchors[c]].item_id, res.cluster_weights[c]});
    if (clusters) *clusters = std::move(res);
    return s;
}

inline SubsetSpec select_anchor_points(const EmbeddingSet& e, const ScoreMatrix& m, std::size_t n, std::uint64_t seed) {
    return select_anchor_points(e.vectors, m, n, seed);
}

// --- learned selectors -------------------------------------------------------

enum class LearnMode { sampling, search };

struct LearnOptions {
    LearnMode mode = LearnMode::sampling;
    std::size_t n = 10;
    std::uint64_t seed = 0;
    std::vector<double> lambda_grid = learn_lambda_grid();
    std::size_t search_iterations = 1000;
    double holdout_fraction = 0.25;
    std::size_t cv_folds = 5;
    std::size_t jobs = 1;
};

struct LearnResult {
    SubsetSpec subset;
    RidgeModel model;
    std::vector<double> candidate_mae; // search mode only
    std::size_t best_candidate = 0;
};

inline Eigen::MatrixXd subset_features(const ScoreMatrix& m, std::span<const std::size_t> items) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(m.num_models()), static_cast<Eigen::Index>(items.size()));
    for (std::size_t j = 0; j < items.size(); ++j) x.col(static_cast<Eigen::Index>(j)) = m.values().col(static_cast<Eigen::Index>(items[j]));
    return x;
}

namespace detail {

/// Ridge from subset scores to reference scores; intercept-only when the
/// targets carry no signal.
inline RidgeModel fit_reference_regressor(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                          const std::vector<double>& grid, std::size_t folds) {
    require(!grid.empty(), "learn selector: empty lambda grid");
    if ((y.array() == y(0)).all()) {
        RidgeModel r;
        r.weights = Eigen::VectorXd::Zero(x.cols());
        r.intercept = y(0);
        r.lambda = *std::max_element(grid.begin(), grid.end());
        return r;
    }
    const auto k = std::min<Eigen::Index>(static_cast<Eigen::Index>(folds), x.rows());
    return ridge_cv(x, y, grid, k).model;
}

constexpr std::uint64_t kModelSplitStream = 0x5eed5b117ULL;

} // namespace detail

/// Random-sampling-learn (one task-balanced draw) or random-search-learn
/// (best of N candidates by validation MAE on a fixed 75/25 model split,
/// refit on all models). Candidate i draws from stream (seed, i), so search
/// with one candidate reproduces sampling mode.
inline LearnResult select_learn(const ScoreMatrix& m, const LearnOptions& opt) {
    detail::check_size(opt.n, m);
    detail::require(!opt.lambda_grid.empty(), "learn selector: empty lambda grid");
    const auto k = m.num_models();
    const std::string method = opt.mode == LearnMode::sampling ? "random_sampling_learn" : "random_search_learn";
    const auto ref = reference_scores(m);
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ref.data(), static_cast<Eigen::Index>(ref.size()));

    auto draw = [&](std::size_t i) {
        Rng rng(derive_seed(opt.seed, {i}));
        return task_balanced_draw(m, opt.n, rng);
    };

    LearnResult res;
    std::vector<std::size_t> best_items;
    if (opt.mode == LearnMode::sampling) {
        detail::require(k >= 2, "random_sampling_learn: need at least 2 source models");
        best_items = draw(0);
    } else {
        detail::require(k >= 4, "random_search_learn: need at least 4 source models");
        detail::require(opt.search_iterations >= 1, "random_search_learn: N_search must be >= 1");
        detail::require(opt.holdout_fraction > 0.0 && opt.holdout_fraction < 1.0, "random_search_learn: bad holdout fraction");
        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        Rng split_rng(derive_seed(opt.seed, {detail::kModelSplitStream}));
        split_rng.shuffle(perm);
        auto n_val = static_cast<std::size_t>(std::lround(opt.holdout_fraction * static_cast<double>(k)));
        n_val = std::clamp<std::size_t>(n_val, 1, k - 2);
        std::vector<Eigen::Index> val(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_val));
        std::vector<Eigen::Index> train(perm.begin() + static_cast<std::ptrdiff_t>(n_val), perm.end());
        std::sort(val.begin(), val.end());
        std::sort(train.begin(), train.end());

        res.candidate_mae.assign(opt.search_iterations, 0.0);
        std::vector<std::vector<std::size_t>> candidates(opt.search_iterations);
        parallel_for(opt.search_iterations, opt.jobs, [&](std::size_t i) {
            candidates[i] = draw(i);
            const auto x = subset_features(m, candidates[i]);
            const auto g = detail::fit_reference_regressor(x(train, Eigen::all), y(train), opt.lambda_grid, opt.cv_folds);
            const Eigen::VectorXd err = g.predict(Eigen::MatrixXd(x(val, Eigen::all))) - y(val);
            res.candidate_mae[i] = err.cwiseAbs().mean();
        });
        for (std::size_t i = 1; i < opt.search_iterations; ++i) {
            if (res.candidate_mae[i] < res.candidate_mae[res.best_candidate]) res.best_candidate = i;
        }
        best_items = std::move(candidates[res.best_candidate]);
    }
    res.model = detail::fit_reference_regressor(subset_features(m, best_items), y, opt.lambda_grid, opt.cv_folds);
    for (auto i : best_items) res.model.item_ids.push_back(m.items()[i].item_id);
    res.subset = uniform_subset(m, method, best_items, opt.seed);
    return res;
}

// --- method registry and two-stage interface ---------------------------------

enum class Method {
    random_balanced,
    random_sampling_learn,
    random_search_learn,
    variance_top,
    difficulty_stratified,
    irt_anchor,
    anchor_points,
    semantic_anchor,
    acoustic_anchor,
    combined_anchor,
};

inline const std::vector<std::pair<Method, std::string_view>>& method_table() {
    static const std::vector<std::pair<Method, std::string_view>> t{
        {Method::random_balanced, "random_balanced"},
        {Method::random_sampling_learn, "random_sampling_learn"},
        {Method::random_search_learn, "random_search_learn"},
        {Method::variance_top, "variance_top"},
        {Method::difficulty_stratified, "difficulty_stratified"},
        {Method::irt_anchor, "irt_anchor"},
        {Method::anchor_points, "anchor_points"},
        {Method::semantic_anchor, "semantic_anchor"},
        {Method::acoustic_anchor, "acoustic_anchor"},
        {Method::combined_anchor, "combined_anchor"},
    };
    return t;
}

inline std::string_view to_string(Method m) {
    for (const auto& [k, v] : method_table())
        if (k == m) return v;
    return "?";
}

/// Accepts canonical names plus the short aliases `random`, `variance`,
/// `difficulty`, `irt`, `sampling_learn`, `search_learn`.
inline std::optional<Method> parse_method(std::string_view s) {
    for (const auto& [k, v] : method_table())
        if (v == s) return k;
    if (s == "random") return Method::random_balanced;
    if (s == "variance") return Method::variance_top;
    if (s == "difficulty") return Method::difficulty_stratified;
    if (s == "irt") return Method::irt_anchor;
    if (s == "sampling_learn") return Method::random_sampling_learn;
    if (s == "search_learn") return Method::random_search_learn;
    return std::nullopt;
}

inline std::string method_list() {
    std::string out;
    for (const auto& [k, v] : method_table()) out += (out.empty() ? "" : ", ") + std::string(v);
    return out;
}

struct SelectorConfig {
    Method method = Method::random_balanced;
    std::size_t n = 10;
    std::uint64_t seed = 0;
    std::size_t bins = 10;
    std::size_t search_iterations = 1000;
    double holdout_fraction = 0.25;
    std::vector<double> lambda_grid = learn_lambda_grid();
    std::size_t cv_folds = 5;
    int irt_dim = 5;
    int irt_epochs = 500;
    double irt_learning_rate = 0.1;
    Eigen::Index embedding_dim = 50; // standalone semantic/acoustic PCA target
    int kmeans_max_iterations = 300;
    std::size_t jobs = 1;

    void validate() const {
        detail::require(n >= 1, "selector config: n must be positive");
        detail::require(bins >= 1, "selector config: B must be >= 1");
        detail::require(search_iterations >= 1, "selector config: N_search must be >= 1");
        detail::require(!lambda_grid.empty(), "selector config: empty lambda grid");
        for (double l : lambda_grid) detail::require(std::isfinite(l) && l >= 0.0, "selector config: lambda must be >= 0");
        detail::require(embedding_dim >= 1, "selector config: embedding dim must be positive");
    }
};

struct EmbeddingSources {
    std::optional<EmbeddingSet> semantic;
    std::optional<EmbeddingSet> acoustic;
};

struct Selection {
    SubsetSpec subset;
    std::optional<RidgeModel> ridge; // learn methods
    std::optional<IrtModel> irt;     // irt_anchor
};

/// Per-source-pool state that does not depend on n: embeddings, the fitted IRT
/// model. Lets one fit serve every subset size.
struct PreparedPool {
    SelectorConfig config;
    ScoreMatrix source;
    Eigen::MatrixXd points; // anchor family
    std::optional<IrtModel> irt;
};

inline PreparedPool prepare(const SelectorConfig& cfg, const ScoreMatrix& source, const EmbeddingSources& emb = {}) {
    cfg.validate();
    PreparedPool p{cfg, source, {}, std::nullopt};
    auto need = [&](const std::optional<EmbeddingSet>& e, const char* what) -> const EmbeddingSet& {
        if (!e) detail::fail(std::string(to_string(cfg.method)) + " requires " + what + " embeddings");
        detail::require(e->vectors.rows() == static_cast<Eigen::Index>(source.num_items()),
                        std::string(what) + " embeddings do not cover the pool");
        return *e;
    };
    switch (cfg.method) {
    case Method::anchor_points:
        detail::require(source.num_models() >= 2, "anchor_points: need at least 2 source models");
        p.points = performance_embedding(source).vectors;
        break;
    case Method::semantic_anchor:
        p.points = reduce_embedding(need(emb.semantic, "semantic"), cfg.embedding_dim).vectors;
        break;
    case Method::acoustic_anchor:
        p.points = reduce_embedding(need(emb.acoustic, "acoustic"), cfg.embedding_dim).vectors;
        break;
    case Method::combined_anchor:
        detail::require(source.num_models() >= 2, "combined_anchor: need at least 2 source models");
        p.points = assemble_combined(need(emb.acoustic, "acoustic"), need(emb.semantic, "semantic"), source).vectors;
        break;
    case Method::irt_anchor: {
        M2plOptions o;
        o.dim = cfg.irt_dim;
        o.epochs = cfg.irt_epochs;
        o.learning_rate = cfg.irt_learning_rate;
        o.seed = cfg.seed;
        std::vector<std::string> ids;
        for (const auto& it : source.items()) ids.push_back(it.item_id);
        p.irt = fit_m2pl(binarize(source), o, std::move(ids), source.model_ids());
        p.points = item_embeddings(*p.irt).vectors;
        break;
    }
    case Method::variance_top:
        detail::require(source.num_models() >= 2, "variance_top: need at least 2 source models");
        break;
    default:
        break;
    }
    return p;
}

inline Selection select(const PreparedPool& p, std::size_t n, std::uint64_t seed) {
    const auto& cfg = p.config;
    const auto& m = p.source;
    const std::string name(to_string(cfg.method));
    switch (cfg.method) {
    case Method::random_balanced:
        return {select_random_balanced(m, n, seed), std::nullopt, std::nullopt};
    case Method::variance_top: {
        auto s = select_variance_top(m, n);
        s.seed = seed;
        return {std::move(s), std::nullopt, std::nullopt};
    }
    case Method::difficulty_stratified:
        return {select_difficulty_stratified(m, n, cfg.bins, seed), std::nullopt, std::nullopt};
    case Method::random_sampling_learn:
    case Method::random_search_learn: {
        LearnOptions o;
        o.mode = cfg.method == Method::random_sampling_learn ? LearnMode::sampling : LearnMode::search;
        o.n = n;
        o.seed = seed;
        o.lambda_grid = cfg.lambda_grid;
        o.search_iterations = cfg.search_iterations;
        o.holdout_fraction = cfg.holdout_fraction;
        o.cv_folds = cfg.cv_folds;
        o.jobs = cfg.jobs;
        auto r = select_learn(m, o);
        return {std::move(r.subset), std::move(r.model), std::nullopt};
    }
    case Method::irt_anchor:
    case Method::anchor_points:
    case Method::semantic_anchor:
    case Method::acoustic_anchor:
    case Method::combined_anchor: {
        Selection s{select_anchor_points(p.points, m, n, seed, name, cfg.kmeans_max_iterations), std::nullopt, p.irt};
        return s;
    }
    }
    throw InternalError("select: unknown method");
}

inline Selection run_selector(const SelectorConfig& cfg, const ScoreMatrix& source, const EmbeddingSources& emb = {}) {
    return select(prepare(cfg, source, emb), cfg.n, cfg.seed);
}

/// Full-benchmark score estimates for every model in `targets` using the
/// prediction rule of the selection's method: APW for anchor methods, p-IRT for
/// IRT, the fitted regressor for learn methods, and the subset task average
/// for the unweighted selectors.
inline std::vector<double> predict_scores(const Selection& sel, const ScoreMatrix& targets) {
    const auto items = validate_subset(sel.subset, targets);
    const auto method = parse_method(sel.subset.method);
    if (!method) detail::fail("unknown subset method '" + sel.subset.method + "'");
    std::vector<double> out(targets.num_models());
    switch (*method) {
    case Method::random_sampling_learn:
    case Method::random_search_learn: {
        detail::require(sel.ridge.has_value(), "learn selection without a fitted regressor");
        const auto pred = sel.ridge->predict(subset_features(targets, items));
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = pred(static_cast<Eigen::Index>(k));
        return out;
    }
    case Method::irt_anchor:
        detail::require(sel.irt.has_value(), "IRT selection without a fitted model");
        return pirt_predict(targets, sel.subset, *sel.irt);
    case Method::anchor_points:
    case Method::semantic_anchor:
    case Method::acoustic_anchor:
    case Method::combined_anchor:
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = apw_score(targets, sel.subset, k);
        return out;
    default:
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = subset_task_average(targets, items, k);
        return out;
    }
}

} // namespace coreset
