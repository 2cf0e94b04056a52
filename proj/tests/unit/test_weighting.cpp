// Copyright 2026 The Coreset Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "coreset/weighting.hpp"
#include "support.hpp"

using namespace coreset;
using coreset::fixtures::make_matrix;

TEST(BalanceWeights, DirectFormula) {
    const auto m = make_matrix({2, 3}, Eigen::MatrixXd::Zero(1, 5));
    const auto b = balance_weights(m);
    EXPECT_DOUBLE_EQ(b[0], 0.25);
    EXPECT_DOUBLE_EQ(b[1], 0.25);
    for (int i = 2; i < 5; ++i) EXPECT_DOUBLE_EQ(b[i], 1.0 / 6.0);

    const auto single = balance_weights(make_matrix({4}, Eigen::MatrixXd::Zero(1, 4)));
    for (double w : single) EXPECT_DOUBLE_EQ(w, 0.25);
}

TEST(BalanceWeights, FortyTaskTable) {
    std::vector<std::size_t> sizes(40, 10);
    sizes[7] = 200;
    std::size_t n = 0;
    for (auto s : sizes) n += s;
    const auto m = make_matrix(sizes, Eigen::MatrixXd::Zero(1, static_cast<Eigen::Index>(n)));
    const auto b = balance_weights(m);
    EXPECT_DOUBLE_EQ(b[m.tasks()[7].items.front()], 1.0 / 8000.0);
}

TEST(BalanceWeights, PropertySumsToOne) {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 300; ++trial) {
        const auto sizes = fixtures::random_task_sizes(gen, 60, 300);
        std::size_t n = 0;
        for (auto s : sizes) n += s;
        const auto b = balance_weights(make_matrix(sizes, Eigen::MatrixXd::Zero(1, static_cast<Eigen::Index>(n))));
        EXPECT_NEAR(accurate_sum(b), 1.0, 1e-9);
    }
}

TEST(ReferenceScore, Examples) {
    Eigen::MatrixXd v(2, 5);
    v << 1.0, 0.0, 0.5, 0.5, 0.5, 1, 1, 1, 1, 1;
    const auto m = make_matrix({2, 3}, v);
    EXPECT_DOUBLE_EQ(reference_score(m, 0), 0.5);
    EXPECT_DOUBLE_EQ(reference_score(m, "m01"), 1.0);
    EXPECT_THROW(reference_score(m, "nope"), ValidationError);
}

TEST(ReferenceScore, EqualsBalanceWeightedSum) {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 100; ++trial) {
        const auto m = fixtures::random_matrix(gen, 3, fixtures::random_task_sizes(gen, 12, 30));
        const auto b = balance_weights(m);
        for (std::size_t k = 0; k < m.num_models(); ++k) {
            long double direct = 0;
            for (std::size_t i = 0; i < m.num_items(); ++i) direct += static_cast<long double>(b[i]) * m.score(k, i);
            EXPECT_NEAR(reference_score(m, k), static_cast<double>(direct), 1e-12);
        }
    }
}

TEST(ReferenceScore, InvariantToItemAndTaskOrder) {
    std::mt19937_64 gen(8);
    const std::vector<std::size_t> sizes{3, 1, 4, 2};
    const auto m = fixtures::random_matrix(gen, 4, sizes);
    std::vector<std::size_t> perm(m.num_items());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<ItemRecord> items;
    Eigen::MatrixXd v(m.values().rows(), m.values().cols());
    for (std::size_t j = 0; j < perm.size(); ++j) {
        items.push_back(m.items()[perm[j]]);
        v.col(static_cast<Eigen::Index>(j)) = m.values().col(static_cast<Eigen::Index>(perm[j]));
    }
    const ScoreMatrix shuffled(m.model_ids(), items, v);
    for (std::size_t k = 0; k < m.num_models(); ++k) EXPECT_NEAR(reference_score(m, k), reference_score(shuffled, k), 1e-15);
}

TEST(ApwScore, Examples) {
    Eigen::MatrixXd v(1, 3);
    v << 1.0, 0.0, 0.5;
    const auto m = make_matrix({3}, v);
    SubsetSpec s{"anchor_points", 3, 0, {{"i000", 0.5}, {"i001", 0.3}, {"i002", 0.2}}};
    EXPECT_NEAR(apw_score(m, s, 0), 0.6, 1e-15);

    SubsetSpec one{"anchor_points", 1, 0, {{"i002", 1.0}}};
    EXPECT_DOUBLE_EQ(apw_score(m, one, 0), 0.5);

    SubsetSpec all{"anchor_points", 3, 0, {{"i000", 1.0 / 3}, {"i001", 1.0 / 3}, {"i002", 1.0 / 3}}};
    EXPECT_NEAR(apw_score(m, all, 0), reference_score(m, 0), 1e-15);
}

TEST(ApwScore, ConvexCombinationProperty) {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = fixtures::random_matrix(gen, 2, {20});
        SubsetSpec s{"anchor_points", 5, 0, {}};
        double total = 0;
        std::vector<double> w(5);
        for (auto& x : w) total += (x = u(gen));
        double lo = 1, hi = 0;
        for (std::size_t j = 0; j < 5; ++j) {
            s.entries.push_back({m.items()[j * 3].item_id, w[j] / total});
            lo = std::min(lo, m.score(0, j * 3));
            hi = std::max(hi, m.score(0, j * 3));
        }
        const double a = apw_score(m, s, 0);
        EXPECT_GE(a, lo - 1e-15);
        EXPECT_LE(a, hi + 1e-15);
    }
}

TEST(SubsetSpec, ValidationAndJson) {
    const auto m = make_matrix({3}, Eigen::MatrixXd::Zero(1, 3));
    SubsetSpec good{"random_balanced", 2, 9, {{"i000", 0.5}, {"i002", 0.5}}};
    EXPECT_EQ(validate_subset(good, m), (std::vector<std::size_t>{0, 2}));
    EXPECT_THROW(validate_subset(SubsetSpec{"x", 2, 0, {{"i000", 0.5}, {"i000", 0.5}}}, m), ValidationError);
    EXPECT_THROW(validate_subset(SubsetSpec{"x", 1, 0, {{"zz", 1.0}}}, m), ValidationError);
    EXPECT_THROW(validate_subset(SubsetSpec{"x", 2, 0, {{"i000", 0.5}, {"i001", 0.6}}}, m), ValidationError);
    EXPECT_THROW(validate_subset(SubsetSpec{"x", 3, 0, {{"i000", 1.0}}}, m), ValidationError);

    const auto back = subset_from_json(Json::parse(to_json(good).dump()));
    EXPECT_EQ(back.entries, good.entries);
    EXPECT_EQ(back.seed, 9u);
    EXPECT_EQ(back.method, "random_balanced");
}

TEST(SubsetTaskAverage, AveragesRepresentedTasks) {
    Eigen::MatrixXd v(1, 5);
    v << 1.0, 0.0, 0.2, 0.4, 0.9;
    const auto m = make_matrix({2, 3}, v);
    const std::vector<std::size_t> items{0, 1, 2};
    EXPECT_NEAR(subset_task_average(m, items, 0), (0.5 + 0.2) / 2, 1e-15);
}
