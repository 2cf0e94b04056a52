// Copyright 2026 The Coreset Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Seeded synthetic pools with known ground truth, emitted in the same file
// formats the loaders accept.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "coreset/data_model.hpp"
#include "coreset/embeddings.hpp"
#include "coreset/irt.hpp"
#include "coreset/rng.hpp"
#include "coreset/weighting.hpp"

namespace coreset {

struct SynthConfig {
    std::size_t models = 24;
    std::size_t tasks = 20;
    std::size_t items_per_task = 50;
    int latent_dim = 2;          // M2PL datasets only
    double ability_spread = 1.0; // sd of model ability
    double noise = 0.5;          // sd of task-specific and per-item model noise
    std::uint64_t seed = 0;
    Eigen::Index semantic_dim = 32;
    Eigen::Index acoustic_dim = 24;
    std::size_t rated_models = 7;

    void validate() const {
        detail::require(models >= 1 && tasks >= 1 && items_per_task >= 1, "synth: counts must be positive");
        detail::require(latent_dim >= 1, "synth: latent dim must be positive");
        detail::require(std::isfinite(ability_spread) && ability_spread >= 0.0, "synth: ability spread must be >= 0");
        detail::require(std::isfinite(noise) && noise >= 0.0, "synth: noise must be >= 0");
        detail::require(semantic_dim >= 1 && acoustic_dim >= 1, "synth: embedding dims must be positive");
    }
    std::size_t num_items() const { return tasks * items_per_task; }
};

namespace detail {

inline std::string padded(const char* prefix, std::size_t i, std::size_t count) {
    const auto width = std::to_string(count > 0 ? count - 1 : 0).size();
    std::string digits = std::to_string(i);
    return prefix + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

// Independent streams per generated quantity.
enum SynthStream : std::uint64_t { kAbility = 1, kItems, kNoise, kSemantic, kAcoustic, kRatings, kM2pl, kResponses };

} // namespace detail

inline std::vector<std::string> synth_model_ids(std::size_t k) {
    std::vector<std::string> ids;
    for (std::size_t m = 0; m < k; ++m) ids.push_back(detail::padded("m", m, k));
    return ids;
}

/// Y_il ~ Bernoulli(sigmoid(alpha_i . theta_l - beta_i)).
inline BinarizedResponses sample_responses(const M2plParams& p, std::uint64_t seed) {
    Rng rng(seed);
    const Eigen::MatrixXd logits = (p.theta * p.alpha.transpose()).rowwise() - p.beta.transpose();
    BinarizedResponses r{Eigen::MatrixXd(logits.rows(), logits.cols()), 0.5};
    for (Eigen::Index l = 0; l < logits.rows(); ++l)
        for (Eigen::Index i = 0; i < logits.cols(); ++i) r.y(l, i) = rng.bernoulli(sigmoid(logits(l, i))) ? 1.0 : 0.0;
    return r;
}

struct M2plDataset {
    IrtModel truth;
    BinarizedResponses responses;
};

/// alpha, beta ~ N(0, 1), theta ~ N(0, spread^2); items = tasks * items_per_task.
inline M2plDataset gen_m2pl_dataset(const SynthConfig& cfg) {
    cfg.validate();
    const auto n = static_cast<Eigen::Index>(cfg.num_items());
    const auto k = static_cast<Eigen::Index>(cfg.models);
    const Eigen::Index d = cfg.latent_dim;
    Rng rng(derive_seed(cfg.seed, {detail::kM2pl}));
    M2plParams p{Eigen::MatrixXd(n, d), Eigen::VectorXd(n), Eigen::MatrixXd(k, d)};
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) p.alpha(i, j) = rng.normal();
    for (Eigen::Index i = 0; i < n; ++i) p.beta(i) = rng.normal();
    for (Eigen::Index l = 0; l < k; ++l)
        for (Eigen::Index j = 0; j < d; ++j) p.theta(l, j) = cfg.ability_spread * rng.normal();
    M2plDataset out;
    out.responses = sample_responses(p, derive_seed(cfg.seed, {detail::kResponses}));
    out.truth.params = std::move(p);
    for (Eigen::Index i = 0; i < n; ++i) out.truth.item_ids.push_back(detail::padded("i", static_cast<std::size_t>(i), cfg.num_items()));
    out.truth.model_ids = synth_model_ids(cfg.models);
    return out;
}

struct SynthBenchmark {
    ScoreMatrix matrix;
    std::vector<double> ability; // per model, in model order
};

/// s_mi = clamp(sigmoid(gamma_i * (a_m - delta_i) + noise * (u_mt + e_mi))) with
/// a_m ~ N(0, spread^2), task offset delta_t ~ N(0, 1), delta_i = delta_t +
/// 0.5 N(0, 1), gamma_i = exp(0.3 N(0, 1)), u and e standard normal. With
/// noise = 0 every score is increasing in a_m.
inline SynthBenchmark gen_benchmark(const SynthConfig& cfg) {
    cfg.validate();
    const auto k = cfg.models, t = cfg.tasks, per = cfg.items_per_task, n = cfg.num_items();
    std::vector<ItemRecord> items;
    items.reserve(n);
    static const char* const kMetrics[] = {"accuracy", "wer", "gpt_score", "utmos", "latency_s"};
    for (std::size_t tt = 0; tt < t; ++tt) {
        for (std::size_t j = 0; j < per; ++j) {
            items.push_back({detail::padded("t", tt, t) + "_" + detail::padded("i", j, per), detail::padded("t", tt, t),
                             kMetrics[tt % 5], tt % 4 != 3, tt % 3 == 0});
        }
    }

    Rng ab(derive_seed(cfg.seed, {detail::kAbility}));
    std::vector<double> ability(k);
    for (auto& a : ability) a = cfg.ability_spread * ab.normal();

    Rng it(derive_seed(cfg.seed, {detail::kItems}));
    std::vector<double> delta(n), gamma(n);
    for (std::size_t tt = 0; tt < t; ++tt) {
        const double offset = it.normal();
        for (std::size_t j = 0; j < per; ++j) {
            delta[tt * per + j] = offset + 0.5 * it.normal();
            gamma[tt * per + j] = std::exp(0.3 * it.normal());
        }
    }

    Rng nz(derive_seed(cfg.seed, {detail::kNoise}));
    Eigen::MatrixXd v(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
    for (std::size_t m = 0; m < k; ++m) {
        for (std::size_t tt = 0; tt < t; ++tt) {
            const double u = nz.normal();
            for (std::size_t j = 0; j < per; ++j) {
                const std::size_t i = tt * per + j;
                const double e = nz.normal();
                const double z = gamma[i] * (ability[m] - delta[i]) + cfg.noise * (u + e);
                v(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i)) = std::clamp(sigmoid(z), 0.0, 1.0);
            }
        }
    }
    return {ScoreMatrix(synth_model_ids(k), std::move(items), std::move(v)), std::move(ability)};
}

/// Task-clustered item vectors: task centre ~ N(0, 4 I) plus N(0, I) per item.
inline EmbeddingSet gen_item_embeddings(const ScoreMatrix& m, EmbeddingKind kind, Eigen::Index dim, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd centres(static_cast<Eigen::Index>(m.num_tasks()), dim);
    for (Eigen::Index t = 0; t < centres.rows(); ++t)
        for (Eigen::Index c = 0; c < dim; ++c) centres(t, c) = 2.0 * rng.normal();
    EmbeddingSet e{kind, Eigen::MatrixXd(static_cast<Eigen::Index>(m.num_items()), dim)};
    for (std::size_t i = 0; i < m.num_items(); ++i) {
        const auto t = static_cast<Eigen::Index>(m.task_of()[i]);
        for (Eigen::Index c = 0; c < dim; ++c) e.vectors(static_cast<Eigen::Index>(i), c) = centres(t, c) + rng.normal();
    }
    return e;
}

inline const std::vector<std::string>& synth_rating_dimensions() {
    static const std::vector<std::string> d{"effectiveness", "naturalness", "overall", "quality", "understanding"};
    return d;
}

/// Likert means on the 1-6 scale for the first `rated_models` models, tracking
/// standardized reference scores with per-dimension noise. Stored rescaled.
inline HumanRatingsTable gen_ratings(const ScoreMatrix& m, std::size_t rated, std::uint64_t seed) {
    rated = std::min(rated, m.num_models());
    const auto ref = reference_scores(m);
    const double mean = accurate_sum(ref) / static_cast<double>(ref.size());
    double var = 0.0;
    for (double r : ref) var += (r - mean) * (r - mean);
    const double sd = ref.size() > 1 && var > 0.0 ? std::sqrt(var / static_cast<double>(ref.size() - 1)) : 1.0;
    Rng rng(seed);
    const auto& dims = synth_rating_dimensions();
    HumanRatingsTable h{{m.model_ids().begin(), m.model_ids().begin() + static_cast<std::ptrdiff_t>(rated)}, dims, {}};
    h.ratings_unit.resize(static_cast<Eigen::Index>(rated), static_cast<Eigen::Index>(dims.size()));
    for (std::size_t d = 0; d < dims.size(); ++d) {
        const double slope = 0.8 + 0.2 * static_cast<double>(d);
        for (std::size_t r = 0; r < rated; ++r) {
            const double z = (ref[r] - mean) / sd;
            h.ratings_unit(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d)) = sigmoid(slope * z + 0.3 * rng.normal());
        }
    }
    return h;
}

struct SynthPool {
    SynthBenchmark benchmark;
    EmbeddingSet semantic, acoustic;
    HumanRatingsTable ratings;
};

inline SynthPool gen_pool(const SynthConfig& cfg) {
    auto b = gen_benchmark(cfg);
    auto sem = gen_item_embeddings(b.matrix, EmbeddingKind::semantic, cfg.semantic_dim, derive_seed(cfg.seed, {detail::kSemantic}));
    auto aco = gen_item_embeddings(b.matrix, EmbeddingKind::acoustic, cfg.acoustic_dim, derive_seed(cfg.seed, {detail::kAcoustic}));
    auto rat = gen_ratings(b.matrix, cfg.rated_models, derive_seed(cfg.seed, {detail::kRatings}));
    return {std::move(b), std::move(sem), std::move(aco), std::move(rat)};
}

/// Normalization rules for the synthetic metric names.
inline NormConfig synth_norm_config() {
    return {{"accuracy", NormalizationRule::identity()},
            {"wer", NormalizationRule::capped_error(1.0)},
            {"gpt_score", NormalizationRule::affine(1.0, 10.0)},
            {"utmos", NormalizationRule::affine(1.0, 5.0)},
            {"latency_s", NormalizationRule::capped_error(5.0)}};
}

/// Inverse of the synthetic normalization rules: a raw value that maps back to s.
inline double synth_raw_value(double s, const NormalizationRule& rule) {
    switch (rule.kind) {
    case NormalizationRule::Kind::identity: return s;
    case NormalizationRule::Kind::one_minus_capped_error: return (1.0 - s) * rule.cap;
    case NormalizationRule::Kind::affine_unit: return rule.lo + s * (rule.hi - rule.lo);
    }
    throw InternalError("synth_raw_value: unknown rule kind");
}

inline void write_items_csv(std::ostream& out, const std::vector<ItemRecord>& items) {
    csv::write_row(out, {"item_id", "task_id", "metric", "needs_audio_in", "needs_audio_out"});
    for (const auto& it : items)
        csv::write_row(out, {it.item_id, it.task_id, it.metric_name, it.needs_audio_in ? "1" : "0", it.needs_audio_out ? "1" : "0"});
}

inline void write_raw_scores_csv(std::ostream& out, const ScoreMatrix& m, const NormConfig& norm) {
    csv::write_row(out, {"model_id", "item_id", "raw_value"});
    for (std::size_t r = 0; r < m.num_models(); ++r) {
        for (std::size_t i = 0; i < m.num_items(); ++i) {
            const auto& it = m.items()[i];
            const auto rule = norm.find(it.metric_name);
            detail::require(rule != norm.end(), "synth: no rule for metric '" + it.metric_name + "'");
            csv::write_row(out, {m.model_ids()[r], it.item_id, csv::format_double(synth_raw_value(m.score(r, i), rule->second))});
        }
    }
}

inline void write_ratings_csv(std::ostream& out, const HumanRatingsTable& h) {
    csv::write_row(out, {"model_id", "dimension", "mean_rating"});
    for (std::size_t m = 0; m < h.model_ids.size(); ++m)
        for (std::size_t d = 0; d < h.dimensions.size(); ++d)
            csv::write_row(out, {h.model_ids[m], h.dimensions[d],
                                 csv::format_double(1.0 + 5.0 * h.ratings_unit(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d)))});
}

inline Json to_json(const NormConfig& norm) {
    Json j = Json::object();
    for (const auto& [metric, rule] : norm) j[metric] = rule_to_json(rule);
    return j;
}

/// Output file names written by write_pool.
struct PoolFiles {
    static constexpr const char* items = "items.csv";
    static constexpr const char* scores = "scores.csv";
    static constexpr const char* norm = "norm.json";
    static constexpr const char* semantic = "semantic.csv";
    static constexpr const char* acoustic = "acoustic.csv";
    static constexpr const char* ratings = "ratings.csv";
};

inline std::ofstream open_output(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) detail::fail("cannot write '" + p.string() + "'");
    return out;
}

/// Writes the pool in loader formats; returns the written paths.
inline std::vector<std::filesystem::path> write_pool(const std::filesystem::path& dir, const SynthPool& p) {
    std::filesystem::create_directories(dir);
    const auto norm = synth_norm_config();
    const auto& m = p.benchmark.matrix;
    std::vector<std::filesystem::path> paths;
    auto emit = [&](const char* name, auto&& body) {
        auto path = dir / name;
        auto out = open_output(path);
        body(out);
        if (!out) detail::fail("error writing '" + path.string() + "'");
        paths.push_back(path);
    };
    emit(PoolFiles::items, [&](std::ostream& o) { write_items_csv(o, m.items()); });
    emit(PoolFiles::scores, [&](std::ostream& o) { write_raw_scores_csv(o, m, norm); });
    emit(PoolFiles::norm, [&](std::ostream& o) { o << to_json(norm).dump(2) << '\n'; });
    emit(PoolFiles::semantic, [&](std::ostream& o) { write_embeddings(o, p.semantic, m.items()); });
    emit(PoolFiles::acoustic, [&](std::ostream& o) { write_embeddings(o, p.acoustic, m.items()); });
    emit(PoolFiles::ratings, [&](std::ostream& o) { write_ratings_csv(o, p.ratings); });
    return paths;
}

} // namespace coreset
