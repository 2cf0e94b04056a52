// Copyright 2026 The Coreset Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace coreset {

/// Pairwise summation with long-double leaves. Order of operations depends only
/// on the input length, so results are reproducible.
inline double accurate_sum(std::span<const double> xs) {
    constexpr std::size_t leaf = 128;
    if (xs.size() <= leaf) {
        long double acc = 0.0L;
        for (double x : xs) acc += x;
        return static_cast<double>(acc);
    }
    const std::size_t half = xs.size() / 2;
    return accurate_sum(xs.first(half)) + accurate_sum(xs.subspan(half));
}

/// Logistic function, stable for large |x|.
inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// log(sigmoid(x)) without overflow or underflow to -inf.
inline double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

} // namespace coreset
