// Copyright 2026 The Coreset Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// On-disk JSON containers: the validated pool bundle, selections with their
// fitted predictors, and the dual-mode release export.

#include <map>
#include <string>

#include "coreset/data_model.hpp"
#include "coreset/embeddings.hpp"
#include "coreset/irt.hpp"
#include "coreset/regression.hpp"
#include "coreset/selectors.hpp"
#include "coreset/weighting.hpp"

namespace coreset {

inline constexpr const char* kBundleFormat = "coreset-bundle/1";
inline constexpr const char* kReleaseFormat = "coreset-release/1";

struct Bundle {
    ScoreMatrix matrix;
    EmbeddingSources embeddings;
};

inline Json to_json(const Bundle& b) {
    Json emb = Json::object();
    if (b.embeddings.semantic) emb["semantic"] = to_json(*b.embeddings.semantic);
    if (b.embeddings.acoustic) emb["acoustic"] = to_json(*b.embeddings.acoustic);
    return {{"format", kBundleFormat}, {"matrix", to_json(b.matrix)}, {"embeddings", std::move(emb)}};
}

inline Bundle bundle_from_json(const Json& j) {
    detail::require(j.is_object() && j.value("format", "") == kBundleFormat,
                    std::string("bundle: expected format '") + kBundleFormat + "'");
    detail::require(j.contains("matrix"), "bundle: missing matrix");
    Bundle b{score_matrix_from_json(j["matrix"]), {}};
    const auto n = b.matrix.num_items();
    if (j.contains("embeddings")) {
        const auto& e = j["embeddings"];
        if (e.contains("semantic")) b.embeddings.semantic = embedding_from_json(e["semantic"], EmbeddingKind::semantic, n);
        if (e.contains("acoustic")) b.embeddings.acoustic = embedding_from_json(e["acoustic"], EmbeddingKind::acoustic, n);
    }
    return b;
}

/// SubsetSpec JSON plus the fitted predictor, if the method has one.
inline Json to_json(const Selection& s) {
    Json j = to_json(s.subset);
    if (s.ridge) j["regressor"] = to_json(*s.ridge);
    if (s.irt) j["irt"] = to_json(*s.irt);
    return j;
}

inline Selection selection_from_json(const Json& j) {
    Selection s{subset_from_json(j), std::nullopt, std::nullopt};
    if (j.contains("regressor")) s.ridge = ridge_from_json(j["regressor"]);
    if (j.contains("irt")) s.irt = irt_model_from_json(j["irt"]);
    return s;
}

/// Rated models x subset items, rows in ratings order.
inline Eigen::MatrixXd preference_features(const ScoreMatrix& m, const SubsetSpec& subset, const HumanRatingsTable& h) {
    const auto items = validate_subset(subset, m);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(h.model_ids.size()), static_cast<Eigen::Index>(items.size()));
    for (std::size_t r = 0; r < h.model_ids.size(); ++r) {
        const auto row = m.require_model(h.model_ids[r]);
        for (std::size_t j = 0; j < items.size(); ++j)
            x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = m.score(row, items[j]);
    }
    return x;
}

/// Ridge on all rated models with the LOOCV-selected lambda; features named by item.
inline RidgeModel fit_preference_model(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const SubsetSpec& subset,
                                       const std::vector<double>& grid = preference_lambda_grid()) {
    auto m = ridge_loocv(x, y, grid).model;
    m.item_ids = subset.item_ids();
    return m;
}

/// Benchmark-weight mode (subset weights) plus preference-regression mode
/// (one ridge model per rating dimension over the same items).
struct Release {
    SubsetSpec subset;
    std::map<std::string, RidgeModel> regressors;
};

inline Json to_json(const Release& r) {
    Json regs = Json::object();
    for (const auto& [dim, m] : r.regressors) regs[dim] = to_json(m);
    return {{"format", kReleaseFormat}, {"benchmark_mode", to_json(r.subset)}, {"regression_mode", std::move(regs)}};
}

} // namespace coreset
