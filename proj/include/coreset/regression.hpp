// Copyright 2026 The Coreset Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Closed-form ridge regression with an unpenalized intercept, grid-search
// cross-validation, and the two preference-prediction protocols: leave one
// model out (LOMO) and exhaustive train-on-K-2 pairwise ranking.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coreset/data_model.hpp"
#include "coreset/parallel.hpp"
#include "coreset/stats.hpp"

namespace coreset {

struct RidgeModel {
    Eigen::VectorXd weights;
    double intercept = 0.0;
    double lambda = 0.0;
    std::vector<std::string> item_ids; // feature names; empty when anonymous

    double predict_one(const Eigen::Ref<const Eigen::RowVectorXd>& x) const { return x.dot(weights) + intercept; }
    Eigen::VectorXd predict(const Eigen::MatrixXd& x) const {
        return (x * weights).array() + intercept;
    }
};

/// 10^-4 ... 10^4, the grid used for preference regression.
inline std::vector<double> preference_lambda_grid() {
    std::vector<double> g;
    for (int e = -4; e <= 4; ++e) g.push_back(std::pow(10.0, e));
    return g;
}

/// {0.001, 0.01, 0.1, 1, 10, 100}, the grid used by the learn selectors.
inline std::vector<double> learn_lambda_grid() { return {0.001, 0.01, 0.1, 1.0, 10.0, 100.0}; }

/// Minimizes sum (y - Xw - b)^2 + lambda |w|^2. Solves the primal system when
/// features <= rows and the dual (Gram) system otherwise; both are exact.
inline RidgeModel ridge_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda) {
    detail::require(x.rows() >= 1, "ridge_fit: need at least one row");
    detail::require(x.rows() == y.size(), "ridge_fit: X/y row mismatch");
    detail::require(std::isfinite(lambda) && lambda >= 0.0, "ridge_fit: lambda must be >= 0");
    detail::require(x.allFinite() && y.allFinite(), "ridge_fit: non-finite input");

    const Eigen::RowVectorXd xm = x.colwise().mean();
    const double ym = y.mean();
    const Eigen::MatrixXd xc = x.rowwise() - xm;
    const Eigen::VectorXd yc = y.array() - ym;
    const Eigen::Index n = x.cols();

    RidgeModel model;
    model.lambda = lambda;
    if (n == 0) {
        model.weights.resize(0);
    } else if (lambda == 0.0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xc);
        if (qr.rank() < n) detail::fail("ridge_fit: singular system at lambda = 0");
        model.weights = qr.solve(yc);
    } else if (n <= x.rows()) {
        Eigen::MatrixXd a = xc.transpose() * xc;
        a.diagonal().array() += lambda;
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() != Eigen::Success) throw InternalError("ridge_fit: factorization failed");
        model.weights = llt.solve(xc.transpose() * yc);
    } else {
        Eigen::MatrixXd g = xc * xc.transpose();
        g.diagonal().array() += lambda;
        Eigen::LLT<Eigen::MatrixXd> llt(g);
        if (llt.info() != Eigen::Success) throw InternalError("ridge_fit: factorization failed");
        model.weights = xc.transpose() * llt.solve(yc);
    }
    model.intercept = ym - xm.dot(model.weights);
    return model;
}

struct RidgeCvResult {
    RidgeModel model;
    std::vector<double> grid;
    std::vector<double> cv_errors; // mean held-out MSE per grid entry
};

/// Contiguous k-fold split of m rows; the first m % k folds get one extra row.
inline std::vector<std::vector<Eigen::Index>> contiguous_folds(Eigen::Index m, Eigen::Index k) {
    std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(k));
    Eigen::Index start = 0;
    for (Eigen::Index f = 0; f < k; ++f) {
        const Eigen::Index size = m / k + (f < m % k ? 1 : 0);
        for (Eigen::Index r = start; r < start + size; ++r) folds[static_cast<std::size_t>(f)].push_back(r);
        start += size;
    }
    return folds;
}

/// Picks the lambda with the lowest mean held-out squared error (ties go to
/// the larger lambda) and refits on all rows.
inline RidgeCvResult ridge_cv(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<double> grid,
                              Eigen::Index folds) {
    detail::require(!grid.empty(), "ridge_cv: empty lambda grid");
    detail::require(x.rows() == y.size(), "ridge_cv: X/y row mismatch");
    std::sort(grid.begin(), grid.end());
    RidgeCvResult res;
    res.grid = grid;
    if (grid.size() == 1) {
        res.model = ridge_fit(x, y, grid.front());
        return res;
    }
    detail::require(folds >= 2, "ridge_cv: need at least 2 folds to compare lambdas");
    detail::require(folds <= x.rows(), "ridge_cv: more folds than rows");

    const auto split = contiguous_folds(x.rows(), folds);
    res.cv_errors.assign(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::vector<double> fold_mse;
        for (const auto& test : split) {
            std::vector<Eigen::Index> train;
            for (Eigen::Index r = 0, t = 0; r < x.rows(); ++r) {
                if (t < static_cast<Eigen::Index>(test.size()) && test[static_cast<std::size_t>(t)] == r) {
                    ++t;
                } else {
                    train.push_back(r);
                }
            }
            const auto m = ridge_fit(x(train, Eigen::all), y(train), grid[g]);
            const Eigen::VectorXd resid = y(test) - m.predict(Eigen::MatrixXd(x(test, Eigen::all)));
            fold_mse.push_back(resid.squaredNorm() / static_cast<double>(test.size()));
        }
        res.cv_errors[g] = accurate_sum(fold_mse) / static_cast<double>(fold_mse.size());
    }
    const double best = *std::min_element(res.cv_errors.begin(), res.cv_errors.end());
    std::size_t pick = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (res.cv_errors[g] <= best * (1.0 + 1e-12)) pick = g;
    }
    res.model = ridge_fit(x, y, grid[pick]);
    return res;
}

inline RidgeCvResult ridge_loocv(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<double>& grid) {
    return ridge_cv(x, y, grid, x.rows());
}

struct LomoFold {
    std::size_t held_out = 0;
    double lambda = 0.0;
    Eigen::VectorXd predictions;  // every model
    std::optional<double> pearson; // empty when undefined (zero variance)
};

struct PairOutcome {
    std::size_t first = 0, second = 0;
    double lambda = 0.0;
    double predicted_first = 0.0, predicted_second = 0.0;
    bool correct = false;
    std::optional<bool> baseline_correct;
};

struct ProtocolReport {
    std::string protocol;
    std::vector<std::string> model_ids;
    std::vector<double> grid;
    std::vector<LomoFold> folds;
    std::vector<PairOutcome> pairs;
    std::optional<double> mean_pearson;    // LOMO: mean over defined folds
    std::optional<double> heldout_pearson; // LOMO: held-out predictions only
    std::optional<double> accuracy;        // pairwise
    std::optional<double> baseline_accuracy;
};

namespace detail {

inline std::vector<Eigen::Index> rows_except(Eigen::Index m, std::initializer_list<Eigen::Index> skip) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index r = 0; r < m; ++r) {
        if (std::find(skip.begin(), skip.end(), r) == skip.end()) rows.push_back(r);
    }
    return rows;
}

inline void check_protocol_inputs(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Eigen::Index min_models,
                                  const char* what) {
    require(x.rows() == y.size(), std::string(what) + ": feature/rating row mismatch");
    require(x.rows() >= min_models,
            std::string(what) + ": need at least " + std::to_string(min_models) + " rated models");
}

} // namespace detail

/// Leave-one-model-out: for each held-out model, LOOCV-select lambda on the
/// rest, refit, predict every model, and correlate predictions with ratings
/// over all models.
inline ProtocolReport preference_lomo(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                      const std::vector<double>& grid = preference_lambda_grid(),
                                      std::size_t jobs = 1) {
    detail::check_protocol_inputs(x, y, 3, "preference_lomo");
    const Eigen::Index k = x.rows();
    ProtocolReport rep;
    rep.protocol = "lomo";
    rep.grid = grid;
    rep.folds.resize(static_cast<std::size_t>(k));
    parallel_for(static_cast<std::size_t>(k), jobs, [&](std::size_t h) {
        const auto train = detail::rows_except(k, {static_cast<Eigen::Index>(h)});
        const auto cv = ridge_loocv(x(train, Eigen::all), y(train), grid);
        LomoFold f;
        f.held_out = h;
        f.lambda = cv.model.lambda;
        f.predictions = cv.model.predict(x);
        const auto r = pearson({f.predictions.data(), static_cast<std::size_t>(k)}, {y.data(), static_cast<std::size_t>(k)});
        if (!r.degenerate) f.pearson = r.value;
        rep.folds[h] = std::move(f);
    });
    std::vector<double> rs;
    Eigen::VectorXd held(k);
    for (const auto& f : rep.folds) {
        if (f.pearson) rs.push_back(*f.pearson);
        held(static_cast<Eigen::Index>(f.held_out)) = f.predictions(static_cast<Eigen::Index>(f.held_out));
    }
    if (!rs.empty()) rep.mean_pearson = accurate_sum(rs) / static_cast<double>(rs.size());
    const auto hr = pearson({held.data(), static_cast<std::size_t>(k)}, {y.data(), static_cast<std::size_t>(k)});
    if (!hr.degenerate) rep.heldout_pearson = hr.value;
    return rep;
}

/// Exhaustive K-2 / 2 splits: train on the other models (LOOCV lambda), predict
/// the held-out pair, and score whether the predicted order matches the
/// ratings. Ties in either predictions or ratings count as incorrect.
/// `baseline` (optional, one score per model) is scored on the same pairs
/// without any training.
inline ProtocolReport pairwise_52(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  const std::vector<double>& grid = preference_lambda_grid(),
                                  const std::optional<Eigen::VectorXd>& baseline = std::nullopt,
                                  std::size_t jobs = 1) {
    detail::check_protocol_inputs(x, y, 4, "pairwise_52");
    const Eigen::Index k = x.rows();
    detail::require(!baseline || baseline->size() == k, "pairwise_52: baseline size mismatch");
    auto ordered = [](double pi, double pj, double yi, double yj) {
        if (pi == pj || yi == yj) return false;
        return (pi > pj) == (yi > yj);
    };

    ProtocolReport rep;
    rep.protocol = "pairwise52";
    rep.grid = grid;
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = i + 1; j < k; ++j)
            rep.pairs.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), 0.0, 0.0, 0.0, false, std::nullopt});
    parallel_for(rep.pairs.size(), jobs, [&](std::size_t p) {
        auto& out = rep.pairs[p];
        const auto i = static_cast<Eigen::Index>(out.first), j = static_cast<Eigen::Index>(out.second);
        const auto train = detail::rows_except(k, {i, j});
        const auto cv = ridge_loocv(x(train, Eigen::all), y(train), grid);
        out.lambda = cv.model.lambda;
        out.predicted_first = cv.model.predict_one(x.row(i));
        out.predicted_second = cv.model.predict_one(x.row(j));
        out.correct = ordered(out.predicted_first, out.predicted_second, y(i), y(j));
        if (baseline) out.baseline_correct = ordered((*baseline)(i), (*baseline)(j), y(i), y(j));
    });
    std::size_t correct = 0, base_correct = 0;
    for (const auto& p : rep.pairs) {
        correct += p.correct;
        base_correct += p.baseline_correct.value_or(false);
    }
    rep.accuracy = static_cast<double>(correct) / static_cast<double>(rep.pairs.size());
    if (baseline) rep.baseline_accuracy = static_cast<double>(base_correct) / static_cast<double>(rep.pairs.size());
    return rep;
}

inline Json to_json(const RidgeModel& m) {
    Json items = Json::array();
    for (Eigen::Index i = 0; i < m.weights.size(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        items.push_back({{"item_id", idx < m.item_ids.size() ? m.item_ids[idx] : std::to_string(i)},
                         {"weight", m.weights(i)}});
    }
    return {{"lambda", m.lambda}, {"intercept", m.intercept}, {"items", std::move(items)}};
}

inline RidgeModel ridge_from_json(const Json& j) {
    try {
        RidgeModel m;
        m.lambda = j.at("lambda").get<double>();
        m.intercept = j.at("intercept").get<double>();
        const auto& items = j.at("items");
        m.weights.resize(static_cast<Eigen::Index>(items.size()));
        for (std::size_t i = 0; i < items.size(); ++i) {
            m.item_ids.push_back(items[i].at("item_id").get<std::string>());
            m.weights(static_cast<Eigen::Index>(i)) = items[i].at("weight").get<double>();
        }
        return m;
    } catch (const Json::exception& e) {
        detail::fail(std::string("ridge JSON: ") + e.what());
    }
}

inline Json to_json(const ProtocolReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    Json j{{"protocol", r.protocol}, {"model_ids", r.model_ids}, {"lambda_grid", r.grid}};
    auto name = [&](std::size_t i) { return i < r.model_ids.size() ? r.model_ids[i] : std::to_string(i); };
    if (r.protocol == "lomo") {
        Json folds = Json::array();
        for (const auto& f : r.folds) {
            folds.push_back({{"held_out", name(f.held_out)},
                             {"lambda", f.lambda},
                             {"pearson", opt(f.pearson)},
                             {"predictions", std::vector<double>(f.predictions.data(), f.predictions.data() + f.predictions.size())}});
        }
        j["folds"] = std::move(folds);
        j["fold_count"] = r.folds.size();
        j["mean_pearson"] = opt(r.mean_pearson);
        j["heldout_pearson"] = opt(r.heldout_pearson);
    } else {
        Json pairs = Json::array();
        for (const auto& p : r.pairs) {
            Json pj{{"models", {name(p.first), name(p.second)}},
                    {"lambda", p.lambda},
                    {"predicted", {p.predicted_first, p.predicted_second}},
                    {"correct", p.correct}};
            if (p.baseline_correct) pj["baseline_correct"] = *p.baseline_correct;
            pairs.push_back(std::move(pj));
        }
        j["pairs"] = std::move(pairs);
        j["pair_count"] = r.pairs.size();
        j["accuracy"] = opt(r.accuracy);
        j["baseline_accuracy"] = opt(r.baseline_accuracy);
    }
    return j;
}

} // namespace coreset
