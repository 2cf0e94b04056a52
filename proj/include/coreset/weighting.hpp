// Copyright 2026 The Coreset Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "coreset/data_model.hpp"
#include "coreset/numeric.hpp"

namespace coreset {

/// Per-item task-balance weights b_i = 1 / (T * |T_t|).
using BalanceWeights = std::vector<double>;

inline BalanceWeights balance_weights(const ScoreMatrix& m) {
    detail::require(m.num_tasks() >= 1, "balance_weights: empty task table");
    const double T = static_cast<double>(m.num_tasks());
    BalanceWeights b(m.num_items());
    for (const auto& task : m.tasks()) {
        const double w = 1.0 / (T * static_cast<double>(task.items.size()));
        for (auto i : task.items) b[i] = w;
    }
    return b;
}

/// Task-averaged full-pool score of one model: (1/T) sum_t mean_{i in t} s_{m,i}.
inline double reference_score(const ScoreMatrix& m, std::size_t model) {
    detail::require(model < m.num_models(), "reference_score: model index out of range");
    std::vector<double> task_means;
    task_means.reserve(m.num_tasks());
    std::vector<double> buf;
    for (const auto& task : m.tasks()) {
        buf.clear();
        for (auto i : task.items) buf.push_back(m.score(model, i));
        task_means.push_back(accurate_sum(buf) / static_cast<double>(buf.size()));
    }
    return accurate_sum(task_means) / static_cast<double>(task_means.size());
}

inline double reference_score(const ScoreMatrix& m, std::string_view model_id) {
    return reference_score(m, m.require_model(model_id));
}

inline std::vector<double> reference_scores(const ScoreMatrix& m) {
    std::vector<double> out(m.num_models());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = reference_score(m, k);
    return out;
}

struct SubsetEntry {
    std::string item_id;
    double weight = 0.0;

    bool operator==(const SubsetEntry&) const = default;
};

/// Selected items with nonnegative weights summing to one.
struct SubsetSpec {
    std::string method;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::vector<SubsetEntry> entries;

    std::vector<std::string> item_ids() const {
        std::vector<std::string> ids;
        ids.reserve(entries.size());
        for (const auto& e : entries) ids.push_back(e.item_id);
        return ids;
    }
};

inline constexpr double kWeightSumTolerance = 1e-9;

/// Checks the SubsetSpec invariants against a pool; returns item positions.
inline std::vector<std::size_t> validate_subset(const SubsetSpec& s, const ScoreMatrix& m) {
    detail::require(s.n == s.entries.size(), "subset: n does not match entry count");
    detail::require(s.n >= 1, "subset: empty");
    std::vector<std::size_t> pos;
    pos.reserve(s.entries.size());
    std::set<std::string_view> seen;
    std::vector<double> ws;
    for (const auto& e : s.entries) {
        detail::require(seen.insert(e.item_id).second, "subset: duplicate item '" + e.item_id + "'");
        detail::require(std::isfinite(e.weight) && e.weight >= 0.0, "subset: negative weight for '" + e.item_id + "'");
        auto i = m.item_index(e.item_id);
        if (!i) detail::fail("subset references unknown item '" + e.item_id + "'");
        pos.push_back(*i);
        ws.push_back(e.weight);
    }
    detail::require(std::abs(accurate_sum(ws) - 1.0) <= kWeightSumTolerance, "subset: weights do not sum to 1");
    return pos;
}

/// Anchor-point-weighted score: sum_i w_i * s_{m, a_i}.
inline double apw_score(const ScoreMatrix& m, const SubsetSpec& s, std::size_t model) {
    detail::require(model < m.num_models(), "apw_score: model index out of range");
    const auto pos = validate_subset(s, m);
    long double acc = 0.0L;
    for (std::size_t j = 0; j < pos.size(); ++j) {
        acc += static_cast<long double>(s.entries[j].weight) * m.score(model, pos[j]);
    }
    return std::clamp(static_cast<double>(acc), 0.0, 1.0);
}

inline double apw_score(const ScoreMatrix& m, const SubsetSpec& s, std::string_view model_id) {
    return apw_score(m, s, m.require_model(model_id));
}

/// Mean over the tasks represented in the subset of each task's mean subset
/// score. Used to score unweighted selectors (random, variance, difficulty).
inline double subset_task_average(const ScoreMatrix& m, std::span<const std::size_t> items, std::size_t model) {
    std::vector<std::vector<double>> per_task(m.num_tasks());
    for (auto i : items) per_task[m.task_of()[i]].push_back(m.score(model, i));
    std::vector<double> means;
    for (const auto& v : per_task) {
        if (!v.empty()) means.push_back(accurate_sum(v) / static_cast<double>(v.size()));
    }
    detail::require(!means.empty(), "subset_task_average: empty subset");
    return accurate_sum(means) / static_cast<double>(means.size());
}

inline Json to_json(const SubsetSpec& s) {
    Json items = Json::array();
    for (const auto& e : s.entries) items.push_back({{"item_id", e.item_id}, {"weight", e.weight}});
    return {{"method", s.method}, {"n", s.n}, {"seed", s.seed}, {"items", std::move(items)}};
}

inline SubsetSpec subset_from_json(const Json& j) {
    try {
        SubsetSpec s;
        s.method = j.at("method").get<std::string>();
        s.n = j.at("n").get<std::size_t>();
        s.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& e : j.at("items")) {
            s.entries.push_back({e.at("item_id").get<std::string>(), e.at("weight").get<double>()});
        }
        detail::require(s.n == s.entries.size(), "subset JSON: n does not match item count");
        return s;
    } catch (const Json::exception& e) {
        detail::fail(std::string("subset JSON: ") + e.what());
    }
}

} // namespace coreset
