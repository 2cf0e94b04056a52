// Copyright 2026 The Coreset Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Fixtures shared by unit and acceptance tests.

#include <random>
#include <string>
#include <vector>

#include "coreset/data_model.hpp"

namespace coreset::fixtures {

/// Items named i000.. with the given task sizes; tasks named t0, t1, ...
inline std::vector<ItemRecord> make_items(const std::vector<std::size_t>& task_sizes) {
    std::vector<ItemRecord> items;
    std::size_t id = 0;
    for (std::size_t t = 0; t < task_sizes.size(); ++t) {
        for (std::size_t j = 0; j < task_sizes[t]; ++j, ++id) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "i%03zu", id);
            items.push_back({buf, "t" + std::to_string(t), "accuracy", t % 2 == 0, t % 3 == 0});
        }
    }
    return items;
}

inline std::vector<std::string> make_model_ids(std::size_t k) {
    std::vector<std::string> ids;
    for (std::size_t m = 0; m < k; ++m) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "m%02zu", m);
        ids.push_back(buf);
    }
    return ids;
}

inline ScoreMatrix make_matrix(const std::vector<std::size_t>& task_sizes, const Eigen::MatrixXd& values) {
    return ScoreMatrix(make_model_ids(static_cast<std::size_t>(values.rows())), make_items(task_sizes), values);
}

/// Uniform [0,1] scores.
inline ScoreMatrix random_matrix(std::mt19937_64& gen, std::size_t models, const std::vector<std::size_t>& task_sizes) {
    std::size_t n = 0;
    for (auto s : task_sizes) n += s;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd v(static_cast<Eigen::Index>(models), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = u(gen);
    return make_matrix(task_sizes, v);
}

inline std::vector<std::size_t> random_task_sizes(std::mt19937_64& gen, std::size_t max_tasks, std::size_t max_size) {
    std::uniform_int_distribution<std::size_t> nt(1, max_tasks), sz(1, max_size);
    std::vector<std::size_t> sizes(nt(gen));
    for (auto& s : sizes) s = sz(gen);
    return sizes;
}

} // namespace coreset::fixtures
