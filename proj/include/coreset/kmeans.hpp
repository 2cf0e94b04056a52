// Copyright 2026 The Coreset Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Weighted Lloyd k-means with k-means++ seeding and nearest-member anchors.
//
// Objective: sum_j b_j * ||x_j - mu_{c(j)}||^2 with centroids the b-weighted
// cluster means. Every cluster is kept non-empty, and each cluster is
// represented by its member closest to the centroid.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "coreset/error.hpp"
#include "coreset/numeric.hpp"
#include "coreset/rng.hpp"

namespace coreset {

struct ClusterResult {
    std::vector<std::size_t> assignments; // point -> cluster
    Eigen::MatrixXd centroids;            // k x dim
    std::vector<std::size_t> anchors;     // cluster -> member point
    std::vector<double> cluster_weights;  // cluster -> sum of member weights
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace; // objective after each Lloyd iteration
};

struct KMeansOptions {
    std::uint64_t seed = 0;
    int max_iterations = 300;
    /// Tie-break rank per point (lower wins), e.g. rank of the item id. Empty
    /// means point order.
    std::span<const std::size_t> tie_rank = {};
};

namespace detail {

inline double sqdist(const Eigen::MatrixXd& x, Eigen::Index j, const Eigen::MatrixXd& mu, Eigen::Index c) {
    return (x.row(j) - mu.row(c)).squaredNorm();
}

inline double weighted_objective(const Eigen::MatrixXd& x, std::span<const double> w,
                                 const std::vector<std::size_t>& assign, const Eigen::MatrixXd& mu) {
    std::vector<double> terms(assign.size());
    for (std::size_t j = 0; j < assign.size(); ++j) {
        terms[j] = w[j] * sqdist(x, static_cast<Eigen::Index>(j), mu, static_cast<Eigen::Index>(assign[j]));
    }
    return accurate_sum(terms);
}

} // namespace detail

inline ClusterResult weighted_kmeans(const Eigen::MatrixXd& points, std::span<const double> weights, std::size_t k,
                                     const KMeansOptions& opt = {}) {
    const auto n = static_cast<std::size_t>(points.rows());
    const Eigen::Index dim = points.cols();
    detail::require(k >= 1, "weighted_kmeans: k must be positive");
    detail::require(k <= n, "weighted_kmeans: k = " + std::to_string(k) + " exceeds point count " + std::to_string(n));
    detail::require(weights.size() == n, "weighted_kmeans: weight count does not match point count");
    detail::require(points.allFinite(), "weighted_kmeans: non-finite point coordinates");
    for (double w : weights) detail::require(std::isfinite(w) && w > 0.0, "weighted_kmeans: weights must be positive");
    detail::require(opt.tie_rank.empty() || opt.tie_rank.size() == n, "weighted_kmeans: tie_rank size mismatch");
    detail::require(opt.max_iterations >= 1, "weighted_kmeans: max_iterations must be positive");

    auto rank = [&](std::size_t j) { return opt.tie_rank.empty() ? j : opt.tie_rank[j]; };
    std::vector<std::size_t> by_rank(n);
    std::iota(by_rank.begin(), by_rank.end(), std::size_t{0});
    std::sort(by_rank.begin(), by_rank.end(), [&](auto a, auto b) { return rank(a) < rank(b); });

    ClusterResult res;
    const auto ik = static_cast<Eigen::Index>(k);

    bool identical = true;
    for (std::size_t j = 1; j < n && identical; ++j) {
        identical = (points.row(static_cast<Eigen::Index>(j)) == points.row(0));
    }
    if (identical && k > 1) {
        // Degenerate: first k points by rank become singleton clusters, the rest join cluster 0.
        res.assignments.assign(n, 0);
        res.anchors.assign(by_rank.begin(), by_rank.begin() + static_cast<std::ptrdiff_t>(k));
        for (std::size_t c = 0; c < k; ++c) res.assignments[res.anchors[c]] = c;
        res.centroids.resize(ik, dim);
        for (Eigen::Index c = 0; c < ik; ++c) res.centroids.row(c) = points.row(0);
        res.converged = true;
        res.objective_trace.push_back(0.0);
    } else {
        // k-means++ seeding with D^2 * weight sampling.
        Rng rng(opt.seed);
        Eigen::MatrixXd mu(ik, dim);
        std::vector<double> d2(n, std::numeric_limits<double>::infinity());
        std::vector<bool> chosen(n, false);
        auto sample = [&](const std::vector<double>& mass) -> std::optional<std::size_t> {
            const double total = accurate_sum(mass);
            if (!(total > 0.0)) return std::nullopt;
            const double u = rng.uniform() * total;
            double acc = 0.0;
            std::optional<std::size_t> last;
            for (std::size_t j = 0; j < n; ++j) {
                if (mass[j] <= 0.0) continue;
                acc += mass[j];
                last = j;
                if (u < acc) return j;
            }
            return last;
        };
        std::vector<double> mass(weights.begin(), weights.end());
        for (std::size_t c = 0; c < k; ++c) {
            if (c > 0) {
                for (std::size_t j = 0; j < n; ++j) mass[j] = chosen[j] ? 0.0 : weights[j] * d2[j];
            }
            auto pick = sample(mass);
            if (!pick) {
                // Remaining points coincide with chosen centres.
                for (auto j : by_rank) {
                    if (!chosen[j]) {
                        pick = j;
                        break;
                    }
                }
            }
            chosen[*pick] = true;
            mu.row(static_cast<Eigen::Index>(c)) = points.row(static_cast<Eigen::Index>(*pick));
            for (std::size_t j = 0; j < n; ++j) {
                d2[j] = std::min(d2[j], detail::sqdist(points, static_cast<Eigen::Index>(j), mu, static_cast<Eigen::Index>(c)));
            }
        }

        std::vector<std::size_t> assign(n, 0);
        std::vector<std::size_t> counts(k, 0);
        for (int it = 0; it < opt.max_iterations; ++it) {
            const auto previous = assign;
            // Assignment: move only on strict improvement; lowest cluster index among minima.
            for (std::size_t j = 0; j < n; ++j) {
                const auto ij = static_cast<Eigen::Index>(j);
                std::size_t best = it == 0 ? 0 : assign[j];
                double best_d = detail::sqdist(points, ij, mu, static_cast<Eigen::Index>(best));
                for (std::size_t c = 0; c < k; ++c) {
                    const double d = detail::sqdist(points, ij, mu, static_cast<Eigen::Index>(c));
                    if (d < best_d) {
                        best_d = d;
                        best = c;
                    }
                }
                assign[j] = best;
            }
            std::fill(counts.begin(), counts.end(), 0);
            for (auto a : assign) ++counts[a];
            // Empty-cluster repair: steal the point with the largest weighted
            // distance from a cluster that can spare it.
            for (std::size_t c = 0; c < k; ++c) {
                if (counts[c] > 0) continue;
                std::optional<std::size_t> donor;
                double donor_cost = -1.0;
                for (auto j : by_rank) {
                    if (counts[assign[j]] < 2) continue;
                    const double cost = weights[j] * detail::sqdist(points, static_cast<Eigen::Index>(j), mu,
                                                                    static_cast<Eigen::Index>(assign[j]));
                    if (cost > donor_cost) {
                        donor_cost = cost;
                        donor = j;
                    }
                }
                if (!donor) throw InternalError("weighted_kmeans: no donor point for empty cluster");
                --counts[assign[*donor]];
                assign[*donor] = c;
                counts[c] = 1;
                mu.row(static_cast<Eigen::Index>(c)) = points.row(static_cast<Eigen::Index>(*donor));
            }
            // Update: weighted means.
            Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(ik, dim);
            std::vector<double> wsum(k, 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                sums.row(static_cast<Eigen::Index>(assign[j])) += weights[j] * points.row(static_cast<Eigen::Index>(j));
                wsum[assign[j]] += weights[j];
            }
            for (std::size_t c = 0; c < k; ++c) mu.row(static_cast<Eigen::Index>(c)) = sums.row(static_cast<Eigen::Index>(c)) / wsum[c];

            res.objective_trace.push_back(detail::weighted_objective(points, weights, assign, mu));
            res.iterations = it + 1;
            if (it > 0 && assign == previous) {
                res.converged = true;
                break;
            }
        }
        res.assignments = std::move(assign);
        res.centroids = std::move(mu);
        res.anchors.assign(k, n);
        std::vector<double> anchor_d(k, std::numeric_limits<double>::infinity());
        for (auto j : by_rank) {
            const auto c = res.assignments[j];
            const double d = detail::sqdist(points, static_cast<Eigen::Index>(j), res.centroids, static_cast<Eigen::Index>(c));
            if (d < anchor_d[c]) {
                anchor_d[c] = d;
                res.anchors[c] = j;
            }
        }
    }

    std::vector<std::vector<double>> members(k);
    for (std::size_t j = 0; j < n; ++j) members[res.assignments[j]].push_back(weights[j]);
    res.cluster_weights.resize(k);
    for (std::size_t c = 0; c < k; ++c) res.cluster_weights[c] = accurate_sum(members[c]);
    res.objective = detail::weighted_objective(points, weights, res.assignments, res.centroids);
    return res;
}

} // namespace coreset
