// Copyright 2026 The Coreset Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Item embedding spaces used for clustering: performance vectors, PCA-reduced
// semantic/acoustic vectors, IRT parameters and their concatenation.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coreset/data_model.hpp"

namespace coreset {

enum class EmbeddingKind { performance, semantic, acoustic, irt, combined };

inline const char* to_string(EmbeddingKind k) {
    switch (k) {
    case EmbeddingKind::performance: return "performance";
    case EmbeddingKind::semantic: return "semantic";
    case EmbeddingKind::acoustic: return "acoustic";
    case EmbeddingKind::irt: return "irt";
    case EmbeddingKind::combined: return "combined";
    }
    return "?";
}

/// One row per pool item, in pool order.
struct EmbeddingSet {
    EmbeddingKind kind = EmbeddingKind::performance;
    Eigen::MatrixXd vectors; // N x dim

    Eigen::Index dim() const { return vectors.cols(); }
};

namespace detail {

inline void require_finite(const Eigen::MatrixXd& x, const char* what) {
    if (!x.allFinite()) fail(std::string(what) + ": non-finite input");
}

} // namespace detail

struct PcaFit {
    Eigen::RowVectorXd mean;
    Eigen::MatrixXd components; // D x k, unit columns (zero for surplus components)
    Eigen::VectorXd variances;  // k eigenvalues of the sample covariance, descending
    double total_variance = 0.0;
    Eigen::MatrixXd projected;  // N x k

    Eigen::VectorXd explained_ratio() const {
        if (total_variance <= 0.0) return Eigen::VectorXd::Zero(variances.size());
        return variances / total_variance;
    }
};

/// Principal components of mean-centred rows via eigen-decomposition of the
/// sample covariance (N - 1 denominator). Components are ordered by descending
/// variance; each is signed so its largest-magnitude loading is positive.
/// Components beyond the numerical rank are returned as zero columns.
inline PcaFit pca_fit(const Eigen::MatrixXd& x, Eigen::Index k) {
    detail::require(x.rows() >= 2, "pca: need at least 2 rows");
    detail::require(k >= 1, "pca: target dimension must be positive");
    detail::require(k <= x.cols(), "pca: target dimension " + std::to_string(k) + " exceeds input dimension " +
                                       std::to_string(x.cols()));
    detail::require_finite(x, "pca");

    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    PcaFit fit;
    fit.mean = x.colwise().mean();
    const Eigen::MatrixXd xc = x.rowwise() - fit.mean;
    const double denom = static_cast<double>(n - 1);

    Eigen::VectorXd evals; // descending
    Eigen::MatrixXd evecs; // D x m, matching evals
    if (d <= n) {
        const Eigen::MatrixXd cov = (xc.transpose() * xc) / denom;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        if (es.info() != Eigen::Success) throw InternalError("pca: eigen-decomposition failed");
        evals = es.eigenvalues().reverse();
        evecs = es.eigenvectors().rowwise().reverse();
    } else {
        // Fewer samples than dimensions: decompose the N x N Gram matrix instead.
        const Eigen::MatrixXd gram = (xc * xc.transpose()) / denom;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        if (es.info() != Eigen::Success) throw InternalError("pca: eigen-decomposition failed");
        evals = es.eigenvalues().reverse();
        const Eigen::MatrixXd u = es.eigenvectors().rowwise().reverse();
        evecs = Eigen::MatrixXd::Zero(d, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (evals(j) > 0.0) {
                evecs.col(j) = xc.transpose() * u.col(j);
                const double norm = evecs.col(j).norm();
                if (norm > 0.0) evecs.col(j) /= norm;
            }
        }
    }

    const double top = evals.size() ? std::max(evals(0), 0.0) : 0.0;
    const double tol = top * 1e-10;
    fit.total_variance = xc.squaredNorm() / denom;
    fit.components = Eigen::MatrixXd::Zero(d, k);
    fit.variances = Eigen::VectorXd::Zero(k);
    for (Eigen::Index j = 0; j < k && j < evals.size(); ++j) {
        if (!(evals(j) > tol)) break;
        Eigen::VectorXd v = evecs.col(j);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) v = -v;
        fit.components.col(j) = v;
        fit.variances(j) = evals(j);
    }
    fit.projected = xc * fit.components;
    return fit;
}

inline Eigen::MatrixXd pca_reduce(const Eigen::MatrixXd& x, Eigen::Index k) { return pca_fit(x, k).projected; }

/// Per-column affine map onto [0, 1]; constant columns become all zeros.
inline Eigen::MatrixXd minmax_scale(const Eigen::MatrixXd& x) {
    detail::require(x.rows() >= 1, "minmax_scale: need at least 1 row");
    detail::require_finite(x, "minmax_scale");
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const double lo = x.col(c).minCoeff();
        const double hi = x.col(c).maxCoeff();
        if (hi > lo) {
            out.col(c) = ((x.col(c).array() - lo) / (hi - lo)).cwiseMax(0.0).cwiseMin(1.0).matrix();
        } else {
            out.col(c).setZero();
        }
    }
    return out;
}

/// Rows are the model-score vectors of each item (N x K).
inline EmbeddingSet performance_embedding(const ScoreMatrix& m) {
    return {EmbeddingKind::performance, m.values().transpose()};
}

/// PCA to `target` dims (capped at the source dimensionality).
inline EmbeddingSet reduce_embedding(const EmbeddingSet& e, Eigen::Index target) {
    const Eigen::Index k = std::min(target, e.dim());
    return {e.kind, pca_reduce(e.vectors, k)};
}

/// Per item: [minmax(pca_K(acoustic)) | minmax(pca_K(semantic)) | K model scores |
/// needs_audio_in, needs_audio_out], K = number of models in `m`.
inline EmbeddingSet assemble_combined(const EmbeddingSet& acoustic, const EmbeddingSet& semantic,
                                      const ScoreMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.num_items());
    const auto k = static_cast<Eigen::Index>(m.num_models());
    detail::require(acoustic.vectors.rows() == n, "assemble_combined: acoustic embedding row count mismatch");
    detail::require(semantic.vectors.rows() == n, "assemble_combined: semantic embedding row count mismatch");
    detail::require(k >= 1, "assemble_combined: no models");

    // Sources narrower than K fill their block's leading columns; the rest stay zero.
    EmbeddingSet out{EmbeddingKind::combined, Eigen::MatrixXd::Zero(n, 3 * k + 2)};
    const Eigen::Index ka = std::min(k, acoustic.dim()), ks = std::min(k, semantic.dim());
    out.vectors.leftCols(ka) = minmax_scale(pca_reduce(acoustic.vectors, ka));
    out.vectors.middleCols(k, ks) = minmax_scale(pca_reduce(semantic.vectors, ks));
    out.vectors.middleCols(2 * k, k) = m.values().transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& it = m.items()[static_cast<std::size_t>(i)];
        out.vectors(i, 3 * k) = it.needs_audio_in ? 1.0 : 0.0;
        out.vectors(i, 3 * k + 1) = it.needs_audio_out ? 1.0 : 0.0;
    }
    return out;
}

/// Embedding CSV `item_id,v0,v1,...`, reordered to pool order. Every pool
/// item must appear exactly once and no other ids are allowed.
inline EmbeddingSet load_embeddings(std::istream& in, const std::vector<ItemRecord>& pool, EmbeddingKind kind) {
    const std::string what = std::string(to_string(kind)) + " embeddings";
    const auto t = csv::read(in, what);
    detail::require(t.header.size() >= 2 && t.header[0] == "item_id", what + ": expected header item_id,v0,...");
    for (std::size_t c = 1; c < t.header.size(); ++c) {
        detail::require(t.header[c] == "v" + std::to_string(c - 1), what + ": expected column v" + std::to_string(c - 1));
    }
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < pool.size(); ++i) pos.emplace(pool[i].item_id, i);

    const auto dim = static_cast<Eigen::Index>(t.header.size() - 1);
    EmbeddingSet e{kind, Eigen::MatrixXd(static_cast<Eigen::Index>(pool.size()), dim)};
    std::vector<bool> seen(pool.size(), false);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& f = t.rows[r];
        const std::string where = what + " line " + std::to_string(t.line_numbers[r]);
        auto it = pos.find(f[0]);
        if (it == pos.end()) detail::fail(where + ": item id '" + f[0] + "' not in manifest");
        if (seen[it->second]) detail::fail(what + ": duplicate item id '" + f[0] + "'");
        seen[it->second] = true;
        for (Eigen::Index c = 0; c < dim; ++c) {
            e.vectors(static_cast<Eigen::Index>(it->second), c) =
                csv::parse_double(f[static_cast<std::size_t>(c) + 1], where);
        }
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!seen[i]) detail::fail(what + ": missing embedding for item '" + pool[i].item_id + "'");
    }
    return e;
}

inline void write_embeddings(std::ostream& out, const EmbeddingSet& e, const std::vector<ItemRecord>& pool) {
    std::vector<std::string> header{"item_id"};
    for (Eigen::Index c = 0; c < e.dim(); ++c) header.push_back("v" + std::to_string(c));
    csv::write_row(out, header);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        std::vector<std::string> row{pool[i].item_id};
        for (Eigen::Index c = 0; c < e.dim(); ++c) {
            row.push_back(csv::format_double(e.vectors(static_cast<Eigen::Index>(i), c)));
        }
        csv::write_row(out, row);
    }
}

inline Json to_json(const EmbeddingSet& e) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < e.vectors.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < e.vectors.cols(); ++c) row.push_back(e.vectors(r, c));
        rows.push_back(std::move(row));
    }
    return {{"kind", to_string(e.kind)}, {"vectors", std::move(rows)}};
}

inline EmbeddingSet embedding_from_json(const Json& j, EmbeddingKind kind, std::size_t rows_expected) {
    try {
        const auto& rows = j.at("vectors");
        detail::require(rows.size() == rows_expected, "embedding JSON: row count mismatch");
        const auto dim = rows_expected ? rows[0].size() : 0;
        EmbeddingSet e{kind, Eigen::MatrixXd(static_cast<Eigen::Index>(rows_expected), static_cast<Eigen::Index>(dim))};
        for (std::size_t r = 0; r < rows.size(); ++r) {
            detail::require(rows[r].size() == dim, "embedding JSON: ragged rows");
            for (std::size_t c = 0; c < dim; ++c) {
                e.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
            }
        }
        detail::require_finite(e.vectors, "embedding JSON");
        return e;
    } catch (const Json::exception& ex) {
        detail::fail(std::string("embedding JSON: ") + ex.what());
    }
}

} // namespace coreset
