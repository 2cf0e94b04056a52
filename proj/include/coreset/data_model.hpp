// Copyright 2026 The Coreset Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Item pool ingestion: manifests, raw metric values, normalization rules and
// human ratings, validated into a dense models x items score matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "coreset/csv.hpp"
#include "coreset/error.hpp"

namespace coreset {

using Json = nlohmann::json;

struct ItemRecord {
    std::string item_id;
    std::string task_id;
    std::string metric_name;
    bool needs_audio_in = false;
    bool needs_audio_out = false;

    bool operator==(const ItemRecord&) const = default;
};

struct NormalizationRule {
    enum class Kind { identity, one_minus_capped_error, affine_unit };

    Kind kind = Kind::identity;
    double cap = 1.0; // one_minus_capped_error
    double lo = 0.0;  // affine_unit
    double hi = 1.0;

    static NormalizationRule identity() { return {}; }
    static NormalizationRule capped_error(double cap) {
        NormalizationRule r;
        r.kind = Kind::one_minus_capped_error;
        r.cap = cap;
        r.validate();
        return r;
    }
    static NormalizationRule affine(double lo, double hi) {
        NormalizationRule r;
        r.kind = Kind::affine_unit;
        r.lo = lo;
        r.hi = hi;
        r.validate();
        return r;
    }

    void validate() const {
        if (kind == Kind::one_minus_capped_error) {
            detail::require(std::isfinite(cap) && cap > 0.0, "normalization: cap must be > 0");
        } else if (kind == Kind::affine_unit) {
            detail::require(std::isfinite(lo) && std::isfinite(hi) && hi > lo,
                            "normalization: affine_unit requires hi > lo");
        }
    }
};

/// Maps a raw metric value onto [0, 1].
///
/// identity passes the value through and rejects anything outside [0, 1];
/// one_minus_capped_error computes 1 - min(e, cap) / cap for an error e >= 0;
/// affine_unit computes (s - lo) / (hi - lo) clamped to [0, 1], so judge scores
/// slightly above the nominal scale are tolerated.
inline double normalize(double raw, const NormalizationRule& rule, std::string_view context = {}) {
    rule.validate();
    auto where = [&] { return context.empty() ? std::string() : " (" + std::string(context) + ")"; };
    if (!std::isfinite(raw)) detail::fail("normalize: non-finite raw value" + where());
    switch (rule.kind) {
    case NormalizationRule::Kind::identity:
        if (raw < 0.0 || raw > 1.0) {
            detail::fail("normalize: identity metric value " + csv::format_double(raw) +
                         " outside [0,1]" + where());
        }
        return raw;
    case NormalizationRule::Kind::one_minus_capped_error:
        if (raw < 0.0) {
            detail::fail("normalize: negative error value " + csv::format_double(raw) + where());
        }
        return 1.0 - std::min(raw, rule.cap) / rule.cap;
    case NormalizationRule::Kind::affine_unit:
        return std::clamp((raw - rule.lo) / (rule.hi - rule.lo), 0.0, 1.0);
    }
    throw InternalError("normalize: unknown rule kind");
}

/// 6-point Likert rating to [0, 1].
inline double rescale_rating(double likert) {
    if (!std::isfinite(likert) || likert < 1.0 || likert > 6.0) {
        detail::fail("rating " + csv::format_double(likert) + " outside the 1-6 scale");
    }
    return (likert - 1.0) / 5.0;
}

using NormConfig = std::map<std::string, NormalizationRule, std::less<>>;

inline NormalizationRule rule_from_json(const Json& j, const std::string& metric) {
    const std::string where = "norm config '" + metric + "'";
    detail::require(j.is_object() && j.contains("kind") && j["kind"].is_string(),
                    where + ": expected object with 'kind'");
    const auto kind = j["kind"].get<std::string>();
    const Json params = j.value("params", Json::object());
    auto param = [&](const char* name) {
        detail::require(params.contains(name) && params[name].is_number(),
                        where + ": missing numeric param '" + name + "'");
        return params[name].get<double>();
    };
    try {
        if (kind == "identity") return NormalizationRule::identity();
        if (kind == "one_minus_capped_error") return NormalizationRule::capped_error(param("cap"));
        if (kind == "affine_unit") return NormalizationRule::affine(param("lo"), param("hi"));
    } catch (const ValidationError& e) {
        detail::fail(where + ": " + e.what());
    }
    detail::fail(where + ": unknown kind '" + kind + "'");
}

inline Json rule_to_json(const NormalizationRule& r) {
    switch (r.kind) {
    case NormalizationRule::Kind::identity:
        return {{"kind", "identity"}, {"params", Json::object()}};
    case NormalizationRule::Kind::one_minus_capped_error:
        return {{"kind", "one_minus_capped_error"}, {"params", {{"cap", r.cap}}}};
    case NormalizationRule::Kind::affine_unit:
        return {{"kind", "affine_unit"}, {"params", {{"hi", r.hi}, {"lo", r.lo}}}};
    }
    throw InternalError("rule_to_json: unknown rule kind");
}

inline NormConfig norm_config_from_json(const Json& j) {
    detail::require(j.is_object(), "norm config: expected a JSON object");
    NormConfig cfg;
    for (const auto& [metric, rule] : j.items()) cfg.emplace(metric, rule_from_json(rule, metric));
    return cfg;
}

struct Task {
    std::string id;
    std::vector<std::size_t> items; // positions in the pool
};

/// Dense models x items grid of unit-interval scores plus task structure.
/// Immutable after construction; submatrices over model subsets share the item
/// layout.
class ScoreMatrix {
public:
    ScoreMatrix(std::vector<std::string> model_ids, std::vector<ItemRecord> items, Eigen::MatrixXd values)
        : models_(std::move(model_ids)), layout_(std::make_shared<Layout>(std::move(items))),
          values_(std::move(values)) {
        validate();
    }

    std::size_t num_models() const { return models_.size(); }
    std::size_t num_items() const { return layout_->items.size(); }
    std::size_t num_tasks() const { return layout_->tasks.size(); }

    const std::vector<std::string>& model_ids() const { return models_; }
    const std::vector<ItemRecord>& items() const { return layout_->items; }
    const std::vector<Task>& tasks() const { return layout_->tasks; }
    /// Task index of each item.
    const std::vector<std::size_t>& task_of() const { return layout_->task_of; }
    /// models x items.
    const Eigen::MatrixXd& values() const { return values_; }
    double score(std::size_t model, std::size_t item) const { return values_(model, item); }

    std::optional<std::size_t> item_index(std::string_view id) const {
        auto it = layout_->index.find(std::string(id));
        if (it == layout_->index.end()) return std::nullopt;
        return it->second;
    }
    std::size_t require_item(std::string_view id) const {
        auto i = item_index(id);
        if (!i) detail::fail("unknown item id '" + std::string(id) + "'");
        return *i;
    }
    std::size_t require_model(std::string_view id) const {
        auto it = std::find(models_.begin(), models_.end(), id);
        if (it == models_.end()) detail::fail("unknown model id '" + std::string(id) + "'");
        return static_cast<std::size_t>(it - models_.begin());
    }

    /// Rows for the given model positions, in the given order.
    ScoreMatrix select_models(std::span<const std::size_t> rows) const {
        Eigen::MatrixXd v(static_cast<Eigen::Index>(rows.size()), values_.cols());
        std::vector<std::string> ids;
        ids.reserve(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            detail::require(rows[r] < models_.size(), "select_models: row out of range");
            v.row(static_cast<Eigen::Index>(r)) = values_.row(static_cast<Eigen::Index>(rows[r]));
            ids.push_back(models_[rows[r]]);
        }
        return ScoreMatrix(std::move(ids), layout_, std::move(v));
    }

    /// Same models and items, different values (e.g. binarized responses).
    ScoreMatrix with_values(Eigen::MatrixXd values) const {
        return ScoreMatrix(models_, layout_, std::move(values));
    }

private:
    struct Layout {
        explicit Layout(std::vector<ItemRecord> its) : items(std::move(its)) {
            std::unordered_map<std::string, std::size_t> task_pos;
            task_of.reserve(items.size());
            for (std::size_t i = 0; i < items.size(); ++i) {
                const auto& it = items[i];
                detail::require(!it.item_id.empty(), "item with empty item_id");
                detail::require(!it.task_id.empty(), "item '" + it.item_id + "' has empty task_id");
                if (!index.emplace(it.item_id, i).second) detail::fail("duplicate item id '" + it.item_id + "'");
                auto [pos, inserted] = task_pos.emplace(it.task_id, tasks.size());
                if (inserted) tasks.push_back(Task{it.task_id, {}});
                tasks[pos->second].items.push_back(i);
                task_of.push_back(pos->second);
            }
        }
        std::vector<ItemRecord> items;
        std::vector<Task> tasks;
        std::vector<std::size_t> task_of;
        std::unordered_map<std::string, std::size_t> index;
    };

    ScoreMatrix(std::vector<std::string> model_ids, std::shared_ptr<const Layout> layout, Eigen::MatrixXd values)
        : models_(std::move(model_ids)), layout_(std::move(layout)), values_(std::move(values)) {
        validate();
    }

    void validate() const {
        detail::require(!layout_->items.empty(), "score matrix: no items");
        detail::require(values_.rows() == static_cast<Eigen::Index>(models_.size()) &&
                            values_.cols() == static_cast<Eigen::Index>(layout_->items.size()),
                        "score matrix: value grid shape does not match models x items");
        std::set<std::string_view> seen;
        for (const auto& m : models_) {
            detail::require(!m.empty(), "score matrix: empty model id");
            detail::require(seen.insert(m).second, "score matrix: duplicate model id '" + m + "'");
        }
        for (Eigen::Index r = 0; r < values_.rows(); ++r) {
            for (Eigen::Index c = 0; c < values_.cols(); ++c) {
                const double v = values_(r, c);
                if (!(v >= 0.0 && v <= 1.0)) {
                    detail::fail("score matrix: value for (" + models_[r] + ", " +
                                 layout_->items[c].item_id + ") outside [0,1]");
                }
            }
        }
    }

    std::vector<std::string> models_;
    std::shared_ptr<const Layout> layout_;
    Eigen::MatrixXd values_;
};

/// Human ratings per model and dimension, already rescaled to [0, 1].
struct HumanRatingsTable {
    std::vector<std::string> model_ids;
    std::vector<std::string> dimensions;
    Eigen::MatrixXd ratings_unit; // models x dimensions

    std::size_t dimension_index(std::string_view dim) const {
        auto it = std::find(dimensions.begin(), dimensions.end(), dim);
        if (it == dimensions.end()) detail::fail("ratings: unknown dimension '" + std::string(dim) + "'");
        return static_cast<std::size_t>(it - dimensions.begin());
    }
    Eigen::VectorXd column(std::string_view dim) const {
        return ratings_unit.col(static_cast<Eigen::Index>(dimension_index(dim)));
    }
};

// --- file ingestion -------------------------------------------------------

inline std::vector<ItemRecord> read_items_manifest(std::istream& in) {
    const auto t = csv::read(in, "items manifest");
    csv::expect_header(t, {"item_id", "task_id", "metric", "needs_audio_in", "needs_audio_out"}, "items manifest");
    std::vector<ItemRecord> items;
    items.reserve(t.rows.size());
    std::set<std::string> ids;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& f = t.rows[r];
        const std::string where = "items manifest line " + std::to_string(t.line_numbers[r]);
        ItemRecord it{f[0], f[1], f[2], csv::parse_flag(f[3], where), csv::parse_flag(f[4], where)};
        detail::require(!it.item_id.empty(), where + ": empty item_id");
        detail::require(!it.task_id.empty(), where + ": empty task_id");
        detail::require(ids.insert(it.item_id).second, "items manifest: duplicate item id '" + it.item_id + "'");
        items.push_back(std::move(it));
    }
    detail::require(!items.empty(), "items manifest: no items");
    return items;
}

/// Joins the manifest, long-form raw scores and normalization rules into a
/// dense matrix. Models are ordered by id so the result does not depend on
/// row order in the scores file; items keep manifest order.
inline ScoreMatrix load_pool(std::istream& items_in, std::istream& scores_in, const NormConfig& norm) {
    auto items = read_items_manifest(items_in);
    std::unordered_map<std::string, std::size_t> item_pos;
    for (std::size_t i = 0; i < items.size(); ++i) item_pos.emplace(items[i].item_id, i);
    for (const auto& it : items) {
        if (norm.find(it.metric_name) == norm.end()) {
            detail::fail("norm config: unknown metric '" + it.metric_name + "' (item '" + it.item_id + "')");
        }
    }

    const auto t = csv::read(scores_in, "raw scores");
    csv::expect_header(t, {"model_id", "item_id", "raw_value"}, "raw scores");

    std::map<std::string, std::vector<std::optional<double>>> by_model;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& f = t.rows[r];
        const std::string where = "raw scores line " + std::to_string(t.line_numbers[r]);
        detail::require(!f[0].empty(), where + ": empty model_id");
        auto ip = item_pos.find(f[1]);
        if (ip == item_pos.end()) detail::fail(where + ": unknown item id '" + f[1] + "'");
        const double raw = csv::parse_double(f[2], where);
        auto& row = by_model[f[0]];
        if (row.empty()) row.resize(items.size());
        auto& cell = row[ip->second];
        if (cell) detail::fail("raw scores: duplicate record for (" + f[0] + ", " + f[1] + ")");
        const auto& item = items[ip->second];
        cell = normalize(raw, norm.find(item.metric_name)->second,
                         "model '" + f[0] + "', item '" + item.item_id + "'");
    }
    detail::require(!by_model.empty(), "raw scores: no records");

    std::vector<std::string> model_ids;
    Eigen::MatrixXd values(static_cast<Eigen::Index>(by_model.size()), static_cast<Eigen::Index>(items.size()));
    std::vector<std::string> missing;
    std::size_t missing_count = 0;
    Eigen::Index r = 0;
    for (const auto& [model, row] : by_model) {
        model_ids.push_back(model);
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (!row[i]) {
                if (missing.size() < 10) missing.push_back("(" + model + ", " + items[i].item_id + ")");
                ++missing_count;
                continue;
            }
            values(r, static_cast<Eigen::Index>(i)) = *row[i];
        }
        ++r;
    }
    if (missing_count) {
        std::string msg = "raw scores: " + std::to_string(missing_count) + " missing cell(s):";
        for (const auto& m : missing) msg += " " + m;
        if (missing_count > missing.size()) msg += " ...";
        detail::fail(msg);
    }
    return ScoreMatrix(std::move(model_ids), std::move(items), std::move(values));
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) detail::fail("cannot open '" + path + "'");
    return in;
}

inline Json read_json_file(const std::string& path) {
    auto in = open_input(path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        detail::fail("'" + path + "': invalid JSON: " + e.what());
    }
}

inline ScoreMatrix load_pool(const std::string& items_path, const std::string& scores_path,
                             const std::string& norm_path) {
    auto items = open_input(items_path);
    auto scores = open_input(scores_path);
    return load_pool(items, scores, norm_config_from_json(read_json_file(norm_path)));
}

/// Ratings CSV `model_id,dimension,mean_rating` on the 1-6 scale; rescaled at
/// load. Every (model, dimension) cell must be present exactly once.
inline HumanRatingsTable load_ratings(std::istream& in) {
    const auto t = csv::read(in, "human ratings");
    csv::expect_header(t, {"model_id", "dimension", "mean_rating"}, "human ratings");
    std::map<std::pair<std::string, std::string>, double> cells;
    std::set<std::string> models, dims;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& f = t.rows[r];
        const std::string where = "human ratings line " + std::to_string(t.line_numbers[r]);
        detail::require(!f[0].empty() && !f[1].empty(), where + ": empty model_id or dimension");
        double v;
        try {
            v = rescale_rating(csv::parse_double(f[2], where));
        } catch (const ValidationError& e) {
            detail::fail(where + ": " + e.what());
        }
        if (!cells.emplace(std::make_pair(f[0], f[1]), v).second) {
            detail::fail("human ratings: duplicate record for (" + f[0] + ", " + f[1] + ")");
        }
        models.insert(f[0]);
        dims.insert(f[1]);
    }
    detail::require(!cells.empty(), "human ratings: no records");
    HumanRatingsTable h{{models.begin(), models.end()}, {dims.begin(), dims.end()}, {}};
    h.ratings_unit.resize(static_cast<Eigen::Index>(models.size()), static_cast<Eigen::Index>(dims.size()));
    for (std::size_t m = 0; m < h.model_ids.size(); ++m) {
        for (std::size_t d = 0; d < h.dimensions.size(); ++d) {
            auto it = cells.find({h.model_ids[m], h.dimensions[d]});
            if (it == cells.end()) {
                detail::fail("human ratings: missing cell (" + h.model_ids[m] + ", " + h.dimensions[d] + ")");
            }
            h.ratings_unit(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d)) = it->second;
        }
    }
    return h;
}

inline HumanRatingsTable load_ratings(const std::string& path) {
    auto in = open_input(path);
    return load_ratings(in);
}

// --- serialization ----------------------------------------------------------

inline Json to_json(const ScoreMatrix& m) {
    Json items = Json::array();
    for (const auto& it : m.items()) {
        items.push_back({{"item_id", it.item_id},
                         {"task_id", it.task_id},
                         {"metric", it.metric_name},
                         {"needs_audio_in", it.needs_audio_in},
                         {"needs_audio_out", it.needs_audio_out}});
    }
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.values().rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.values().cols(); ++c) row.push_back(m.values()(r, c));
        rows.push_back(std::move(row));
    }
    return {{"model_ids", m.model_ids()}, {"items", std::move(items)}, {"values", std::move(rows)}};
}

inline ScoreMatrix score_matrix_from_json(const Json& j) {
    try {
        std::vector<ItemRecord> items;
        for (const auto& it : j.at("items")) {
            items.push_back({it.at("item_id").get<std::string>(), it.at("task_id").get<std::string>(),
                             it.at("metric").get<std::string>(), it.at("needs_audio_in").get<bool>(),
                             it.at("needs_audio_out").get<bool>()});
        }
        auto models = j.at("model_ids").get<std::vector<std::string>>();
        const auto& rows = j.at("values");
        detail::require(rows.size() == models.size(), "score matrix JSON: row count mismatch");
        Eigen::MatrixXd v(static_cast<Eigen::Index>(models.size()), static_cast<Eigen::Index>(items.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            detail::require(rows[r].size() == items.size(), "score matrix JSON: column count mismatch");
            for (std::size_t c = 0; c < items.size(); ++c) {
                v(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
            }
        }
        return ScoreMatrix(std::move(models), std::move(items), std::move(v));
    } catch (const Json::exception& e) {
        detail::fail(std::string("score matrix JSON: ") + e.what());
    }
}

} // namespace coreset
