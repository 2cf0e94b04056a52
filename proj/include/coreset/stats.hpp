// Copyright 2026 The Coreset Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Pearson, Spearman (average-rank ties) and Kendall tau-b correlations.
// Zero-variance inputs yield value 0 with `degenerate` set instead of throwing,
// so one degenerate fold cannot abort a long evaluation run.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "coreset/error.hpp"
#include "coreset/numeric.hpp"

namespace coreset {

struct Correlation {
    double value = 0.0;
    bool degenerate = false;
};

inline Correlation pearson(std::span<const double> x, std::span<const double> y) {
    detail::require(x.size() == y.size(), "pearson: length mismatch");
    detail::require(x.size() >= 2, "pearson: need at least 2 observations");
    const auto n = static_cast<double>(x.size());
    const double mx = accurate_sum(x) / n;
    const double my = accurate_sum(y) / n;
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const long double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0 || syy <= 0) return {0.0, true};
    const double r = static_cast<double>(sxy / std::sqrt(sxx * syy));
    return {std::clamp(r, -1.0, 1.0), false};
}

/// 1-based ranks; tied values share the average of their positions.
inline std::vector<double> fractional_ranks(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
        i = j + 1;
    }
    return ranks;
}

inline Correlation spearman(std::span<const double> x, std::span<const double> y) {
    detail::require(x.size() == y.size(), "spearman: length mismatch");
    const auto rx = fractional_ranks(x);
    const auto ry = fractional_ranks(y);
    return pearson(rx, ry);
}

namespace detail {

// Merge sort on v counting pairs i < j with v[i] > v[j].
inline std::int64_t count_inversions(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t inv = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            inv += static_cast<std::int64_t>(mid - i);
            buf[k++] = v[j++];
        } else {
            buf[k++] = v[i++];
        }
    }
    while (i < mid) buf[k++] = v[i++];
    while (j < hi) buf[k++] = v[j++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return inv;
}

inline std::int64_t tied_pairs(const std::vector<double>& sorted) {
    std::int64_t total = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const auto t = static_cast<std::int64_t>(j - i + 1);
        total += t * (t - 1) / 2;
        i = j + 1;
    }
    return total;
}

} // namespace detail

/// Kendall tau-b in O(n log n) (Knight's algorithm).
inline Correlation kendall(std::span<const double> x, std::span<const double> y) {
    detail::require(x.size() == y.size(), "kendall: length mismatch");
    detail::require(x.size() >= 2, "kendall: need at least 2 observations");
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]); });

    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = x[order[i]];
        ys[i] = y[order[i]];
    }
    const std::int64_t x_ties = detail::tied_pairs(xs);
    std::int64_t joint_ties = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && xs[j + 1] == xs[i] && ys[j + 1] == ys[i]) ++j;
        const auto t = static_cast<std::int64_t>(j - i + 1);
        joint_ties += t * (t - 1) / 2;
        i = j + 1;
    }
    std::vector<double> buf(n);
    const std::int64_t swaps = detail::count_inversions(ys, buf, 0, n); // ys is now sorted
    const std::int64_t y_ties = detail::tied_pairs(ys);
    const auto total = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;

    const auto dx = static_cast<double>(total - x_ties);
    const auto dy = static_cast<double>(total - y_ties);
    if (dx <= 0 || dy <= 0) return {0.0, true};
    const auto s = static_cast<double>(total - x_ties - y_ties + joint_ties - 2 * swaps);
    return {std::clamp(s / std::sqrt(dx * dy), -1.0, 1.0), false};
}

enum class CorrelationMetric { pearson, spearman, kendall };

inline const char* to_string(CorrelationMetric m) {
    switch (m) {
    case CorrelationMetric::pearson: return "pearson";
    case CorrelationMetric::spearman: return "spearman";
    case CorrelationMetric::kendall: return "kendall";
    }
    return "?";
}

inline Correlation correlate(CorrelationMetric m, std::span<const double> x, std::span<const double> y) {
    switch (m) {
    case CorrelationMetric::pearson: return pearson(x, y);
    case CorrelationMetric::spearman: return spearman(x, y);
    case CorrelationMetric::kendall: return kendall(x, y);
    }
    throw InternalError("correlate: unknown metric");
}

} // namespace coreset
