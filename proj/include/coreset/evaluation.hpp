// Copyright 2026 The Coreset Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Cross-validated meta-evaluation: correlation-vs-size curves, AUCC and
// N-threshold summaries.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "coreset/csv.hpp"
#include "coreset/parallel.hpp"
#include "coreset/rng.hpp"
#include "coreset/selectors.hpp"
#include "coreset/stats.hpp"
#include "coreset/weighting.hpp"

namespace coreset {

inline std::vector<std::size_t> default_sizes() { return {10, 20, 30, 50, 100, 200, 350, 500, 800, 1000}; }

inline constexpr std::array<CorrelationMetric, 3> kAllMetrics{CorrelationMetric::pearson, CorrelationMetric::spearman,
                                                              CorrelationMetric::kendall};

struct CurvePoint {
    std::size_t n = 0;
    double mean = 0.0;
    double sem = 0.0;
    std::size_t degenerate = 0; // evaluations whose correlation was degenerate
    std::vector<double> values; // one per (repeat, fold), repeat-major
};

struct CorrelationCurve {
    std::string method;
    CorrelationMetric metric = CorrelationMetric::pearson;
    std::vector<CurvePoint> points;
};

/// Mean and standard error (sample sd / sqrt(count)) of one size's evaluations.
inline CurvePoint summarize_point(std::size_t n, std::vector<double> values, std::size_t degenerate = 0) {
    detail::require(!values.empty(), "curve point without evaluations");
    CurvePoint p{n, 0.0, 0.0, degenerate, std::move(values)};
    const auto c = static_cast<double>(p.values.size());
    p.mean = accurate_sum(p.values) / c;
    if (p.values.size() > 1) {
        std::vector<double> dev(p.values.size());
        for (std::size_t i = 0; i < dev.size(); ++i) dev[i] = (p.values[i] - p.mean) * (p.values[i] - p.mean);
        p.sem = std::sqrt(accurate_sum(dev) / (c - 1.0)) / std::sqrt(c);
    }
    return p;
}

/// Trapezoidal area of mean r over the evaluated sizes in [lo, hi], divided
/// by (hi - lo).
inline double aucc(const CorrelationCurve& curve, double lo = 10, double hi = 200) {
    detail::require(hi > lo, "aucc: need hi > lo");
    std::vector<const CurvePoint*> in;
    for (const auto& p : curve.points) {
        const auto n = static_cast<double>(p.n);
        if (n >= lo && n <= hi) in.push_back(&p);
    }
    detail::require(in.size() >= 2, "aucc: fewer than 2 curve points within [" + std::to_string(lo) + ", " +
                                          std::to_string(hi) + "]");
    std::vector<double> areas;
    for (std::size_t i = 1; i < in.size(); ++i) {
        const double w = static_cast<double>(in[i]->n) - static_cast<double>(in[i - 1]->n);
        areas.push_back(0.5 * w * (in[i]->mean + in[i - 1]->mean));
    }
    return accurate_sum(areas) / (hi - lo);
}

/// Smallest evaluated size whose mean r reaches r_min.
inline std::optional<std::size_t> n_threshold(const CorrelationCurve& curve, double r_min) {
    detail::require(!curve.points.empty(), "n_threshold: empty curve");
    for (const auto& p : curve.points)
        if (p.mean >= r_min) return p.n;
    return std::nullopt;
}

struct CrossvalOptions {
    std::vector<std::size_t> sizes = default_sizes();
    std::size_t folds = 3;
    std::size_t repeats = 100;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
};

/// Pearson, Spearman and Kendall curves (in that order) for one selector.
/// Repeat r shuffles models with stream (seed, r); the source fold prepares
/// the selector with seed (seed, r, f) and size n selects with (seed, r, f, n).
inline std::vector<CorrelationCurve> crossval_curves(const ScoreMatrix& m, const SelectorConfig& cfg,
                                                     const EmbeddingSources& emb, const CrossvalOptions& opt) {
    const auto k = m.num_models();
    detail::require(opt.folds >= 2, "crossval: folds must be >= 2");
    detail::require(k >= opt.folds, "crossval: " + std::to_string(k) + " models cannot fill " + std::to_string(opt.folds) + " folds");
    detail::require(k / opt.folds >= 2, "crossval: each held-out fold needs at least 2 models to correlate");
    detail::require(opt.repeats >= 1, "crossval: repeats must be >= 1");
    detail::require(!opt.sizes.empty(), "crossval: no subset sizes");
    for (std::size_t i = 0; i < opt.sizes.size(); ++i) {
        detail::require(i == 0 || opt.sizes[i] > opt.sizes[i - 1], "crossval: sizes must be strictly increasing");
        detail::require(opt.sizes[i] >= 1 && opt.sizes[i] <= m.num_items(),
                        "crossval: subset size " + std::to_string(opt.sizes[i]) + " exceeds pool size " +
                            std::to_string(m.num_items()));
    }
    const auto ref = reference_scores(m);
    const std::size_t units = opt.repeats * opt.folds;
    const std::size_t ns = opt.sizes.size();
    // [unit][size][metric]
    std::vector<std::vector<std::array<Correlation, 3>>> results(units, std::vector<std::array<Correlation, 3>>(ns));

    std::vector<std::vector<std::size_t>> perms(opt.repeats);
    for (std::size_t r = 0; r < opt.repeats; ++r) {
        perms[r].resize(k);
        std::iota(perms[r].begin(), perms[r].end(), std::size_t{0});
        Rng rng(derive_seed(opt.seed, {r}));
        rng.shuffle(perms[r]);
    }

    parallel_for(units, opt.jobs, [&](std::size_t u) {
        const std::size_t r = u / opt.folds, f = u % opt.folds;
        const std::size_t lo = f * k / opt.folds, hi = (f + 1) * k / opt.folds;
        std::vector<std::size_t> held, source;
        for (std::size_t i = 0; i < k; ++i) (i >= lo && i < hi ? held : source).push_back(perms[r][i]);
        std::sort(held.begin(), held.end());
        std::sort(source.begin(), source.end());
        const auto src = m.select_models(source);
        const auto tgt = m.select_models(held);
        std::vector<double> truth;
        for (auto h : held) truth.push_back(ref[h]);
        try {
            SelectorConfig c = cfg;
            c.seed = derive_seed(opt.seed, {r, f});
            c.jobs = 1;
            const auto prepared = prepare(c, src, emb);
            for (std::size_t s = 0; s < ns; ++s) {
                const auto sel = select(prepared, opt.sizes[s], derive_seed(opt.seed, {r, f, opt.sizes[s]}));
                const auto pred = predict_scores(sel, tgt);
                for (std::size_t mi = 0; mi < 3; ++mi) results[u][s][mi] = correlate(kAllMetrics[mi], pred, truth);
            }
        } catch (const ValidationError& e) {
            throw ValidationError(std::string(to_string(cfg.method)) + " (repeat " + std::to_string(r) + ", fold " +
                                  std::to_string(f) + "): " + e.what());
        }
    });

    std::vector<CorrelationCurve> curves;
    for (std::size_t mi = 0; mi < 3; ++mi) {
        CorrelationCurve c{std::string(to_string(cfg.method)), kAllMetrics[mi], {}};
        for (std::size_t s = 0; s < ns; ++s) {
            std::vector<double> vals(units);
            std::size_t degenerate = 0;
            for (std::size_t u = 0; u < units; ++u) {
                vals[u] = results[u][s][mi].value;
                degenerate += results[u][s][mi].degenerate;
            }
            c.points.push_back(summarize_point(opt.sizes[s], std::move(vals), degenerate));
        }
        curves.push_back(std::move(c));
    }
    return curves;
}

inline CorrelationCurve crossval_curve(const ScoreMatrix& m, const SelectorConfig& cfg, const CrossvalOptions& opt,
                                       const EmbeddingSources& emb = {},
                                       CorrelationMetric metric = CorrelationMetric::pearson) {
    auto all = crossval_curves(m, cfg, emb, opt);
    return std::move(all[static_cast<std::size_t>(metric)]);
}

struct CurveSummary {
    std::string method;
    CorrelationMetric metric = CorrelationMetric::pearson;
    std::optional<double> aucc; // absent when fewer than 2 sizes fall in [10, 200]
    std::optional<std::size_t> n90, n95;
};

inline CurveSummary summarize_curve(const CorrelationCurve& c) {
    CurveSummary s{c.method, c.metric, std::nullopt, n_threshold(c, 0.90), n_threshold(c, 0.95)};
    std::size_t in_range = 0;
    for (const auto& p : c.points) in_range += (p.n >= 10 && p.n <= 200);
    if (in_range >= 2) s.aucc = aucc(c);
    return s;
}

struct EvalReport {
    CrossvalOptions options;
    std::vector<CorrelationCurve> curves;
    std::vector<CurveSummary> summaries;
};

inline EvalReport evaluate_methods(const ScoreMatrix& m, const std::vector<SelectorConfig>& methods,
                                   const EmbeddingSources& emb, const CrossvalOptions& opt) {
    EvalReport rep{opt, {}, {}};
    for (const auto& cfg : methods) {
        for (auto& c : crossval_curves(m, cfg, emb, opt)) {
            rep.summaries.push_back(summarize_curve(c));
            rep.curves.push_back(std::move(c));
        }
    }
    return rep;
}

inline std::string render_optional(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "--"; }

inline Json to_json(const EvalReport& r) {
    Json curves = Json::array();
    for (const auto& c : r.curves) {
        Json pts = Json::array();
        for (const auto& p : c.points) {
            pts.push_back({{"n", p.n}, {"mean_r", p.mean}, {"sem", p.sem}, {"count", p.values.size()},
                           {"degenerate", p.degenerate}, {"values", p.values}});
        }
        curves.push_back({{"method", c.method}, {"metric", to_string(c.metric)}, {"points", std::move(pts)}});
    }
    Json sums = Json::array();
    for (const auto& s : r.summaries) {
        auto opt = [](const auto& v) { return v ? Json(*v) : Json(nullptr); };
        sums.push_back({{"method", s.method}, {"metric", to_string(s.metric)}, {"aucc", opt(s.aucc)},
                        {"n90", opt(s.n90)}, {"n95", opt(s.n95)}});
    }
    return {{"config",
             {{"folds", r.options.folds},
              {"repeats", r.options.repeats},
              {"evaluations_per_size", r.options.folds * r.options.repeats},
              {"sizes", r.options.sizes},
              {"seed", r.options.seed}}},
            {"curves", std::move(curves)},
            {"summary", std::move(sums)}};
}

/// Flat `method,n,mean_r,sem,metric` rows.
inline void write_curves_csv(std::ostream& out, const EvalReport& r) {
    csv::write_row(out, {"method", "n", "mean_r", "sem", "metric"});
    for (const auto& c : r.curves) {
        for (const auto& p : c.points) {
            csv::write_row(out, {c.method, std::to_string(p.n), csv::format_double(p.mean), csv::format_double(p.sem),
                                 to_string(c.metric)});
        }
    }
}

/// `method,metric,aucc,n90,n95`; unreached thresholds render as "--".
inline void write_summary_csv(std::ostream& out, const EvalReport& r) {
    csv::write_row(out, {"method", "metric", "aucc", "n90", "n95"});
    for (const auto& s : r.summaries) {
        csv::write_row(out, {s.method, to_string(s.metric), s.aucc ? csv::format_double(*s.aucc) : "--",
                             render_optional(s.n90), render_optional(s.n95)});
    }
}

} // namespace coreset
