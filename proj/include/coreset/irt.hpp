// Copyright 2026 The Coreset Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Multidimensional two-parameter logistic item response model:
//
//   P(Y_il = 1) = sigmoid(alpha_i . theta_l - beta_i)
//
// with standard-normal priors on alpha, beta and theta. Parameters are point
// (MAP) estimates from full-batch gradient ascent on the log-posterior.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coreset/data_model.hpp"
#include "coreset/embeddings.hpp"
#include "coreset/numeric.hpp"
#include "coreset/rng.hpp"
#include "coreset/weighting.hpp"

namespace coreset {

struct BinarizedResponses {
    Eigen::MatrixXd y; // models x items, entries 0 or 1
    double threshold = 0.5;
};

/// Thresholds at c: Y = 1 iff s >= c.
inline BinarizedResponses binarize_at(const ScoreMatrix& m, double c) {
    return {(m.values().array() >= c).cast<double>().matrix(), c};
}

/// Picks the threshold that best preserves the overall mean score. Candidates
/// are every distinct score plus 0 and 1; ties go to the smaller threshold.
inline BinarizedResponses binarize(const ScoreMatrix& m) {
    const auto& v = m.values();
    std::vector<double> sorted(v.data(), v.data() + v.size());
    const double mean = accurate_sum(sorted) / static_cast<double>(sorted.size());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> candidates = sorted;
    candidates.push_back(0.0);
    candidates.push_back(1.0);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    const auto total = static_cast<double>(sorted.size());
    double best_c = candidates.front();
    double best_gap = std::numeric_limits<double>::infinity();
    for (double c : candidates) {
        const auto below = std::lower_bound(sorted.begin(), sorted.end(), c) - sorted.begin();
        const double frac = (total - static_cast<double>(below)) / total;
        const double gap = std::abs(frac - mean);
        if (gap < best_gap) {
            best_gap = gap;
            best_c = c;
        }
    }
    return binarize_at(m, best_c);
}

struct M2plParams {
    Eigen::MatrixXd alpha; // items x d
    Eigen::VectorXd beta;  // items
    Eigen::MatrixXd theta; // models x d
};

struct IrtModel {
    M2plParams params;
    double threshold = 0.5;
    std::vector<std::string> item_ids;
    std::vector<std::string> model_ids;

    Eigen::Index dim() const { return params.alpha.cols(); }
};

inline double m2pl_log_posterior(const Eigen::MatrixXd& y, const M2plParams& p) {
    const Eigen::MatrixXd z = (p.theta * p.alpha.transpose()).rowwise() - p.beta.transpose();
    std::vector<double> terms(static_cast<std::size_t>(z.size()));
    std::size_t t = 0;
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
        for (Eigen::Index r = 0; r < z.rows(); ++r) {
            terms[t++] = y(r, c) > 0.5 ? log_sigmoid(z(r, c)) : log_sigmoid(-z(r, c));
        }
    }
    const double prior = 0.5 * (p.alpha.squaredNorm() + p.beta.squaredNorm() + p.theta.squaredNorm());
    return accurate_sum(terms) - prior;
}

/// Analytic gradient of m2pl_log_posterior.
inline M2plParams m2pl_gradient(const Eigen::MatrixXd& y, const M2plParams& p) {
    const Eigen::MatrixXd z = (p.theta * p.alpha.transpose()).rowwise() - p.beta.transpose();
    const Eigen::MatrixXd resid = y - z.unaryExpr([](double x) { return sigmoid(x); });
    M2plParams g;
    g.alpha = resid.transpose() * p.theta - p.alpha;
    g.theta = resid * p.alpha - p.theta;
    g.beta = -resid.colwise().sum().transpose() - p.beta;
    return g;
}

struct M2plOptions {
    enum class Optimizer { adam, plain };

    int dim = 5;
    int epochs = 500;
    double learning_rate = 0.1;
    std::uint64_t seed = 0;
    Optimizer optimizer = Optimizer::adam;
    /// If set, receives the log-posterior after every epoch (first entry is the initial value).
    std::vector<double>* trace = nullptr;
};

inline IrtModel fit_m2pl(const BinarizedResponses& responses, const M2plOptions& opt,
                         std::vector<std::string> item_ids = {}, std::vector<std::string> model_ids = {}) {
    const auto& y = responses.y;
    detail::require(y.rows() >= 2 && y.cols() >= 2, "fit_m2pl: need at least 2 models and 2 items");
    detail::require(opt.dim >= 1 && opt.epochs >= 0 && opt.learning_rate > 0.0, "fit_m2pl: invalid options");
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double v = y.data()[i];
        detail::require(v == 0.0 || v == 1.0, "fit_m2pl: responses must be binary");
    }
    detail::require(item_ids.empty() || item_ids.size() == static_cast<std::size_t>(y.cols()), "fit_m2pl: item id count");
    detail::require(model_ids.empty() || model_ids.size() == static_cast<std::size_t>(y.rows()), "fit_m2pl: model id count");

    Rng rng(opt.seed);
    auto init = [&](Eigen::Index r, Eigen::Index c) {
        Eigen::MatrixXd m(r, c);
        for (Eigen::Index j = 0; j < c; ++j)
            for (Eigen::Index i = 0; i < r; ++i) m(i, j) = 0.1 * rng.normal();
        return m;
    };
    const Eigen::Index d = opt.dim;
    M2plParams p{init(y.cols(), d), init(y.cols(), 1).col(0), init(y.rows(), d)};

    // Adam state, one slot per parameter block.
    M2plParams m1{Eigen::MatrixXd::Zero(y.cols(), d), Eigen::VectorXd::Zero(y.cols()), Eigen::MatrixXd::Zero(y.rows(), d)};
    M2plParams m2 = m1;
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    if (opt.trace) opt.trace->push_back(m2pl_log_posterior(y, p));

    for (int e = 1; e <= opt.epochs; ++e) {
        const M2plParams g = m2pl_gradient(y, p);
        if (opt.optimizer == M2plOptions::Optimizer::plain) {
            p.alpha += opt.learning_rate * g.alpha;
            p.beta += opt.learning_rate * g.beta;
            p.theta += opt.learning_rate * g.theta;
        } else {
            const double c1 = 1.0 - std::pow(b1, e);
            const double c2 = 1.0 - std::pow(b2, e);
            auto step = [&](auto& param, const auto& grad, auto& mom, auto& var) {
                mom = b1 * mom + (1.0 - b1) * grad;
                var = b2 * var + (1.0 - b2) * grad.cwiseProduct(grad);
                param += (opt.learning_rate * (mom / c1).array() / ((var / c2).array().sqrt() + eps)).matrix();
            };
            step(p.alpha, g.alpha, m1.alpha, m2.alpha);
            step(p.beta, g.beta, m1.beta, m2.beta);
            step(p.theta, g.theta, m1.theta, m2.theta);
        }
        if (opt.trace) opt.trace->push_back(m2pl_log_posterior(y, p));
    }
    if (!p.alpha.allFinite() || !p.beta.allFinite() || !p.theta.allFinite()) {
        throw InternalError("fit_m2pl: parameters diverged");
    }
    return {std::move(p), responses.threshold, std::move(item_ids), std::move(model_ids)};
}

/// Item embedding [alpha_i ; beta_i] of width d + 1.
inline EmbeddingSet item_embeddings(const IrtModel& model) {
    const auto& p = model.params;
    EmbeddingSet e{EmbeddingKind::irt, Eigen::MatrixXd(p.alpha.rows(), p.alpha.cols() + 1)};
    e.vectors.leftCols(p.alpha.cols()) = p.alpha;
    e.vectors.col(p.alpha.cols()) = p.beta;
    return e;
}

/// MAP ability for one model from its responses on anchor items:
/// maximizes sum_a [y log p + (1 - y) log(1 - p)] - |theta|^2 / 2 from theta = 0
/// by damped Newton iterations. The objective is strictly concave.
inline Eigen::VectorXd estimate_ability(const IrtModel& model, std::span<const std::size_t> anchors,
                                        std::span<const double> responses) {
    detail::require(!anchors.empty(), "estimate_ability: empty anchor set");
    detail::require(anchors.size() == responses.size(), "estimate_ability: anchor/response count mismatch");
    const auto& p = model.params;
    const auto n = static_cast<Eigen::Index>(anchors.size());
    const Eigen::Index d = p.alpha.cols();
    Eigen::MatrixXd a(n, d);
    Eigen::VectorXd b(n), y(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto i = anchors[static_cast<std::size_t>(j)];
        detail::require(i < static_cast<std::size_t>(p.alpha.rows()), "estimate_ability: anchor out of range");
        a.row(j) = p.alpha.row(static_cast<Eigen::Index>(i));
        b(j) = p.beta(static_cast<Eigen::Index>(i));
        y(j) = responses[static_cast<std::size_t>(j)];
    }
    auto objective = [&](const Eigen::VectorXd& th) {
        const Eigen::VectorXd z = a * th - b;
        double f = -0.5 * th.squaredNorm();
        for (Eigen::Index j = 0; j < n; ++j) f += y(j) * log_sigmoid(z(j)) + (1.0 - y(j)) * log_sigmoid(-z(j));
        return f;
    };

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
    double f = objective(theta);
    for (int it = 0; it < 500; ++it) {
        const Eigen::VectorXd z = a * theta - b;
        const Eigen::VectorXd prob = z.unaryExpr([](double x) { return sigmoid(x); });
        const Eigen::VectorXd g = a.transpose() * (y - prob) - theta;
        if (g.norm() <= 1e-6) break;
        const Eigen::VectorXd w = prob.cwiseProduct(Eigen::VectorXd::Ones(n) - prob);
        const Eigen::MatrixXd h = a.transpose() * w.asDiagonal() * a + Eigen::MatrixXd::Identity(d, d);
        const Eigen::VectorXd step = h.llt().solve(g);
        double t = 1.0;
        const double slope = g.dot(step);
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
            const Eigen::VectorXd cand = theta + t * step;
            const double fc = objective(cand);
            if (fc >= f + 1e-4 * t * slope) {
                theta = cand;
                f = fc;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    return theta;
}

/// Task-averaged p-IRT estimate for one model: anchors contribute their
/// observed binary responses, every other item its predicted probability.
inline double pirt_score(const ScoreMatrix& layout, const IrtModel& model, std::span<const std::size_t> anchors,
                         std::span<const double> anchor_responses, const Eigen::VectorXd& theta) {
    const auto& p = model.params;
    detail::require(p.alpha.rows() == static_cast<Eigen::Index>(layout.num_items()), "pirt_score: item count mismatch");
    detail::require(anchors.size() == anchor_responses.size(), "pirt_score: anchor/response count mismatch");
    std::vector<double> s(layout.num_items());
    const Eigen::VectorXd z = p.alpha * theta - p.beta;
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = sigmoid(z(static_cast<Eigen::Index>(i)));
    for (std::size_t j = 0; j < anchors.size(); ++j) s[anchors[j]] = anchor_responses[j];

    const auto b = balance_weights(layout);
    std::vector<double> task_scores;
    std::vector<double> num, den;
    for (const auto& task : layout.tasks()) {
        num.clear();
        den.clear();
        for (auto i : task.items) {
            num.push_back(b[i] * s[i]);
            den.push_back(b[i]);
        }
        task_scores.push_back(accurate_sum(num) / accurate_sum(den));
    }
    return std::clamp(accurate_sum(task_scores) / static_cast<double>(task_scores.size()), 0.0, 1.0);
}

/// p-IRT estimates for every model in `targets`: binarize at the model's
/// threshold, estimate ability from the subset's anchors, then score.
inline std::vector<double> pirt_predict(const ScoreMatrix& targets, const SubsetSpec& subset, const IrtModel& model) {
    const auto anchors = validate_subset(subset, targets);
    const auto y = binarize_at(targets, model.threshold).y;
    std::vector<double> out(targets.num_models());
    std::vector<double> resp(anchors.size());
    for (std::size_t m = 0; m < out.size(); ++m) {
        for (std::size_t j = 0; j < anchors.size(); ++j) {
            resp[j] = y(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(anchors[j]));
        }
        const auto theta = estimate_ability(model, anchors, resp);
        out[m] = pirt_score(targets, model, anchors, resp, theta);
    }
    return out;
}

inline Json to_json(const IrtModel& m) {
    const auto& p = m.params;
    auto row = [](const auto& mat, Eigen::Index r) {
        Json a = Json::array();
        for (Eigen::Index c = 0; c < mat.cols(); ++c) a.push_back(mat(r, c));
        return a;
    };
    Json items = Json::array();
    for (Eigen::Index i = 0; i < p.alpha.rows(); ++i) {
        items.push_back({{"item_id", m.item_ids.empty() ? std::to_string(i) : m.item_ids[static_cast<std::size_t>(i)]},
                         {"alpha", row(p.alpha, i)},
                         {"beta", p.beta(i)}});
    }
    Json models = Json::array();
    for (Eigen::Index l = 0; l < p.theta.rows(); ++l) {
        models.push_back({{"model_id", m.model_ids.empty() ? std::to_string(l) : m.model_ids[static_cast<std::size_t>(l)]},
                          {"theta", row(p.theta, l)}});
    }
    return {{"d", m.dim()}, {"threshold", m.threshold}, {"items", std::move(items)}, {"models", std::move(models)}};
}

inline IrtModel irt_model_from_json(const Json& j) {
    try {
        IrtModel m;
        const auto d = j.at("d").get<Eigen::Index>();
        m.threshold = j.at("threshold").get<double>();
        const auto& items = j.at("items");
        const auto& models = j.at("models");
        const auto n = static_cast<Eigen::Index>(items.size());
        const auto k = static_cast<Eigen::Index>(models.size());
        m.params.alpha.resize(n, d);
        m.params.beta.resize(n);
        m.params.theta.resize(k, d);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& it = items[static_cast<std::size_t>(i)];
            m.item_ids.push_back(it.at("item_id").get<std::string>());
            const auto& a = it.at("alpha");
            detail::require(static_cast<Eigen::Index>(a.size()) == d, "IRT JSON: alpha width");
            for (Eigen::Index c = 0; c < d; ++c) m.params.alpha(i, c) = a[static_cast<std::size_t>(c)].get<double>();
            m.params.beta(i) = it.at("beta").get<double>();
        }
        for (Eigen::Index l = 0; l < k; ++l) {
            const auto& md = models[static_cast<std::size_t>(l)];
            m.model_ids.push_back(md.at("model_id").get<std::string>());
            const auto& t = md.at("theta");
            detail::require(static_cast<Eigen::Index>(t.size()) == d, "IRT JSON: theta width");
            for (Eigen::Index c = 0; c < d; ++c) m.params.theta(l, c) = t[static_cast<std::size_t>(c)].get<double>();
        }
        return m;
    } catch (const Json::exception& e) {
        detail::fail(std::string("IRT JSON: ") + e.what());
    }
}

} // namespace coreset
