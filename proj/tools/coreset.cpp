// Copyright 2026 The Coreset Authors
// SPDX-License-Identifier: Apache-2.0

// coreset: ingest pools, select subsets, run the cross-validated evaluation,
// fit preference regressors and export releases.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "coreset/bundle.hpp"
#include "coreset/evaluation.hpp"
#include "coreset/synth.hpp"

namespace fs = std::filesystem;
using namespace coreset;

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw InternalError("sha256 failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) detail::fail("cannot open '" + p.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Json digest_entry(const fs::path& p) { return {{"name", p.filename().string()}, {"sha256", sha256_hex(slurp(p))}}; }

void write_text(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    auto out = open_output(p);
    out << text;
    if (!out) detail::fail("error writing '" + p.string() + "'");
}

void write_json(const fs::path& p, const Json& j) { write_text(p, j.dump(2) + "\n"); }

/// Records what produced the outputs. Paths appear by file name only so the
/// manifest does not depend on the working directory.
void write_manifest(const fs::path& p, const std::string& command, const Json& config, std::optional<std::uint64_t> seed,
                    const std::vector<fs::path>& inputs, const std::vector<fs::path>& outputs) {
    Json in = Json::array(), out = Json::array();
    for (const auto& f : inputs) in.push_back(digest_entry(f));
    for (const auto& f : outputs) out.push_back(digest_entry(f));
    write_json(p, {{"tool", "coreset"},
                   {"version", kToolVersion},
                   {"command", command},
                   {"config", config},
                   {"seed", seed ? Json(*seed) : Json(nullptr)},
                   {"inputs", std::move(in)},
                   {"outputs", std::move(out)}});
}

fs::path manifest_for(const fs::path& output) { return fs::path(output.string() + ".manifest.json"); }

template <class T> std::vector<T> parse_list(const std::string& s, const char* what) {
    std::vector<T> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        if constexpr (std::is_same_v<T, std::string>) {
            out.push_back(tok);
        } else {
            const double v = csv::parse_double(tok, what);
            if constexpr (std::is_integral_v<T>) {
                detail::require(v >= 0 && v == std::floor(v), std::string(what) + ": '" + tok + "' is not a non-negative integer");
            }
            out.push_back(static_cast<T>(v));
        }
    }
    detail::require(!out.empty(), std::string(what) + ": empty list");
    return out;
}

Method require_method(const std::string& name) {
    auto m = parse_method(name);
    if (!m) detail::fail("unknown method '" + name + "'; valid methods: " + method_list());
    return *m;
}

Bundle load_bundle(const std::string& path) { return bundle_from_json(read_json_file(path)); }

std::string base(const std::string& p) { return fs::path(p).filename().string(); }

// Selector parameters shared by `select` and `evaluate`.
struct SelectorFlags {
    std::size_t bins = 10;
    std::size_t search_iterations = 1000;
    double holdout = 0.25;
    std::string lambda_grid = "0.001,0.01,0.1,1,10,100";
    std::size_t cv_folds = 5;
    int irt_dim = 5;
    int irt_epochs = 500;
    double irt_lr = 0.1;
    long embedding_dim = 50;

    void add(CLI::App* app) {
        app->add_option("--bins", bins, "difficulty bins B")->capture_default_str();
        app->add_option("--search-iterations", search_iterations, "random-search candidates")->capture_default_str();
        app->add_option("--holdout", holdout, "validation fraction of models in random search")->capture_default_str();
        app->add_option("--lambda-grid", lambda_grid, "comma-separated ridge penalties for learn methods")->capture_default_str();
        app->add_option("--cv-folds", cv_folds, "ridge CV folds for learn methods")->capture_default_str();
        app->add_option("--irt-dim", irt_dim, "IRT latent dimension")->capture_default_str();
        app->add_option("--irt-epochs", irt_epochs, "IRT optimizer epochs")->capture_default_str();
        app->add_option("--irt-lr", irt_lr, "IRT learning rate")->capture_default_str();
        app->add_option("--embedding-dim", embedding_dim, "PCA target for semantic/acoustic anchors")->capture_default_str();
    }

    SelectorConfig config(Method m, std::size_t n, std::uint64_t seed, std::size_t jobs) const {
        SelectorConfig c;
        c.method = m;
        c.n = n;
        c.seed = seed;
        c.bins = bins;
        c.search_iterations = search_iterations;
        c.holdout_fraction = holdout;
        c.lambda_grid = parse_list<double>(lambda_grid, "--lambda-grid");
        c.cv_folds = cv_folds;
        c.irt_dim = irt_dim;
        c.irt_epochs = irt_epochs;
        c.irt_learning_rate = irt_lr;
        c.embedding_dim = embedding_dim;
        c.jobs = jobs;
        c.validate();
        return c;
    }

    Json echo() const {
        return {{"bins", bins},           {"search_iterations", search_iterations},
                {"holdout", holdout},     {"lambda_grid", parse_list<double>(lambda_grid, "--lambda-grid")},
                {"cv_folds", cv_folds},   {"irt_dim", irt_dim},
                {"irt_epochs", irt_epochs}, {"irt_lr", irt_lr},
                {"embedding_dim", embedding_dim}};
    }
};

/// Options from a JSON `--config` file are spliced in right after the
/// subcommand, so flags given on the command line (parsed later, last value
/// wins) take precedence over the file, which takes precedence over defaults.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (!path) return args;
    const Json cfg = read_json_file(*path);
    detail::require(cfg.is_object(), "config: expected a JSON object");
    std::vector<std::string> injected;
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        if (value.is_boolean()) {
            if (value.get<bool>()) injected.push_back(flag);
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
            injected.insert(injected.end(), {flag, joined});
        } else if (value.is_string()) {
            injected.insert(injected.end(), {flag, value.get<std::string>()});
        } else if (value.is_number()) {
            injected.insert(injected.end(), {flag, value.dump()});
        } else {
            detail::fail("config: unsupported value for '" + key + "'");
        }
    }
    const auto at = args.empty() ? args.end() : args.begin() + 1;
    args.insert(at, injected.begin(), injected.end());
    return args;
}

int report_error(int code, const char* kind, const std::string& message) {
    Json e{{"error", {{"code", code}, {"kind", kind}, {"message", message}}}};
    std::cerr << e.dump() << std::endl;
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark subset selection and evaluation", "coreset"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", kToolVersion);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic pool in loader formats");
    SynthConfig sc;
    std::string synth_out;
    std::uint64_t synth_seed = 0;
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--seed", synth_seed, "master seed")->required();
    synth->add_option("--models", sc.models)->capture_default_str();
    synth->add_option("--tasks", sc.tasks)->capture_default_str();
    synth->add_option("--items-per-task", sc.items_per_task)->capture_default_str();
    synth->add_option("--spread", sc.ability_spread, "ability standard deviation")->capture_default_str();
    synth->add_option("--noise", sc.noise, "task and item noise level")->capture_default_str();
    synth->add_option("--semantic-dim", sc.semantic_dim)->capture_default_str();
    synth->add_option("--acoustic-dim", sc.acoustic_dim)->capture_default_str();
    synth->add_option("--rated-models", sc.rated_models)->capture_default_str();

    // ingest
    auto* ingest = app.add_subcommand("ingest", "validate raw inputs into a bundle");
    std::string items_path, scores_path, norm_path, semantic_path, acoustic_path, bundle_out;
    ingest->add_option("--items", items_path, "items manifest CSV")->required();
    ingest->add_option("--scores", scores_path, "raw scores CSV")->required();
    ingest->add_option("--norm", norm_path, "normalization rules JSON")->required();
    ingest->add_option("--semantic", semantic_path, "semantic embeddings CSV");
    ingest->add_option("--acoustic", acoustic_path, "acoustic embeddings CSV");
    ingest->add_option("--out", bundle_out, "bundle JSON")->required();

    // select
    auto* sel = app.add_subcommand("select", "select a weighted subset");
    std::string sel_bundle, sel_method, sel_out;
    std::size_t sel_n = 0, sel_jobs = 1;
    std::uint64_t sel_seed = 0;
    SelectorFlags sel_flags;
    sel->add_option("--bundle", sel_bundle)->required();
    sel->add_option("--method", sel_method, "one of: " + method_list())->required();
    sel->add_option("--n", sel_n, "subset size")->required();
    sel->add_option("--seed", sel_seed)->required();
    sel->add_option("--jobs", sel_jobs)->capture_default_str();
    sel->add_option("--out", sel_out, "selection JSON")->required();
    sel_flags.add(sel);

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "cross-validated correlation curves");
    std::string ev_bundle, ev_methods = "random_balanced,anchor_points", ev_sizes = "10,20,30,50,100,200,350,500,800,1000";
    std::string ev_json, ev_csv, ev_summary;
    std::size_t ev_folds = 3, ev_repeats = 100, ev_jobs = 1;
    std::uint64_t ev_seed = 0;
    SelectorFlags ev_flags;
    ev->add_option("--bundle", ev_bundle)->required();
    ev->add_option("--methods", ev_methods, "comma-separated methods")->capture_default_str();
    ev->add_option("--sizes", ev_sizes, "comma-separated subset sizes")->capture_default_str();
    ev->add_option("--folds", ev_folds)->capture_default_str();
    ev->add_option("--repeats", ev_repeats)->capture_default_str();
    ev->add_option("--seed", ev_seed)->required();
    ev->add_option("--jobs", ev_jobs)->capture_default_str();
    ev->add_option("--out-json", ev_json, "report JSON")->required();
    ev->add_option("--out-csv", ev_csv, "flat curve CSV")->required();
    ev->add_option("--out-summary", ev_summary, "AUCC / N90 / N95 CSV");
    ev_flags.add(ev);

    // regress
    auto* reg = app.add_subcommand("regress", "preference regression protocols");
    std::string reg_bundle, reg_subset, reg_ratings, reg_protocol, reg_dimension, reg_out, reg_baseline = "none";
    std::size_t reg_jobs = 1;
    reg->add_option("--bundle", reg_bundle)->required();
    reg->add_option("--subset", reg_subset, "selection JSON")->required();
    reg->add_option("--ratings", reg_ratings, "ratings CSV")->required();
    reg->add_option("--protocol", reg_protocol, "lomo or pairwise52")->required();
    reg->add_option("--dimension", reg_dimension, "rating dimension")->required();
    reg->add_option("--baseline", reg_baseline, "pairwise52 baseline: none, apw or reference")->capture_default_str();
    reg->add_option("--jobs", reg_jobs)->capture_default_str();
    reg->add_option("--out", reg_out, "report JSON")->required();

    // export
    auto* exp = app.add_subcommand("export", "dual-mode release: subset weights plus per-dimension regressors");
    std::string exp_bundle, exp_subset, exp_ratings, exp_dims, exp_out;
    exp->add_option("--bundle", exp_bundle)->required();
    exp->add_option("--subset", exp_subset, "selection JSON")->required();
    exp->add_option("--ratings", exp_ratings, "ratings CSV")->required();
    exp->add_option("--dimensions", exp_dims, "comma-separated dimensions (default: all)");
    exp->add_option("--out", exp_out, "release JSON")->required();

    try {
        auto args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error(1, "usage", e.what() + std::string("; run with --help for usage"));
    } catch (const ValidationError& e) {
        return report_error(1, "validation", e.what());
    }

    try {
        auto check_jobs = [](std::size_t j) { detail::require(j >= 1, "--jobs must be >= 1"); };

        if (synth->parsed()) {
            sc.seed = synth_seed;
            const auto pool = gen_pool(sc);
            const auto outputs = write_pool(synth_out, pool);
            const Json cfg{{"models", sc.models},           {"tasks", sc.tasks},
                           {"items_per_task", sc.items_per_task}, {"spread", sc.ability_spread},
                           {"noise", sc.noise},             {"semantic_dim", sc.semantic_dim},
                           {"acoustic_dim", sc.acoustic_dim}, {"rated_models", sc.rated_models}};
            write_manifest(fs::path(synth_out) / "manifest.json", "synth", cfg, synth_seed, {}, outputs);
        } else if (ingest->parsed()) {
            auto m = load_pool(items_path, scores_path, norm_path);
            Bundle b{m, {}};
            std::vector<fs::path> inputs{items_path, scores_path, norm_path};
            Json cfg{{"items", base(items_path)}, {"scores", base(scores_path)}, {"norm", base(norm_path)}};
            if (!semantic_path.empty()) {
                auto in = open_input(semantic_path);
                b.embeddings.semantic = load_embeddings(in, m.items(), EmbeddingKind::semantic);
                inputs.emplace_back(semantic_path);
                cfg["semantic"] = base(semantic_path);
            }
            if (!acoustic_path.empty()) {
                auto in = open_input(acoustic_path);
                b.embeddings.acoustic = load_embeddings(in, m.items(), EmbeddingKind::acoustic);
                inputs.emplace_back(acoustic_path);
                cfg["acoustic"] = base(acoustic_path);
            }
            write_json(bundle_out, to_json(b));
            write_manifest(manifest_for(bundle_out), "ingest", cfg, std::nullopt, inputs, {bundle_out});
        } else if (sel->parsed()) {
            check_jobs(sel_jobs);
            const auto method = require_method(sel_method);
            const auto b = load_bundle(sel_bundle);
            const auto cfg = sel_flags.config(method, sel_n, sel_seed, sel_jobs);
            const auto result = run_selector(cfg, b.matrix, b.embeddings);
            write_json(sel_out, to_json(result));
            Json echo = sel_flags.echo();
            echo["bundle"] = base(sel_bundle);
            echo["method"] = std::string(to_string(method));
            echo["n"] = sel_n;
            write_manifest(manifest_for(sel_out), "select", echo, sel_seed, {sel_bundle}, {sel_out});
        } else if (ev->parsed()) {
            check_jobs(ev_jobs);
            const auto b = load_bundle(ev_bundle);
            CrossvalOptions opt;
            opt.sizes = parse_list<std::size_t>(ev_sizes, "--sizes");
            opt.folds = ev_folds;
            opt.repeats = ev_repeats;
            opt.seed = ev_seed;
            opt.jobs = ev_jobs;
            std::vector<SelectorConfig> configs;
            Json names = Json::array();
            for (const auto& name : parse_list<std::string>(ev_methods, "--methods")) {
                const auto m = require_method(name);
                configs.push_back(ev_flags.config(m, opt.sizes.front(), ev_seed, 1));
                names.push_back(std::string(to_string(m)));
            }
            const auto report = evaluate_methods(b.matrix, configs, b.embeddings, opt);
            write_json(ev_json, to_json(report));
            std::ostringstream curves;
            write_curves_csv(curves, report);
            write_text(ev_csv, curves.str());
            std::vector<fs::path> outputs{ev_json, ev_csv};
            if (!ev_summary.empty()) {
                std::ostringstream s;
                write_summary_csv(s, report);
                write_text(ev_summary, s.str());
                outputs.emplace_back(ev_summary);
            }
            Json echo = ev_flags.echo();
            echo["bundle"] = base(ev_bundle);
            echo["methods"] = names;
            echo["sizes"] = opt.sizes;
            echo["folds"] = opt.folds;
            echo["repeats"] = opt.repeats;
            write_manifest(manifest_for(ev_json), "evaluate", echo, ev_seed, {ev_bundle}, outputs);
        } else if (reg->parsed()) {
            check_jobs(reg_jobs);
            const auto b = load_bundle(reg_bundle);
            const auto s = selection_from_json(read_json_file(reg_subset));
            const auto h = load_ratings(reg_ratings);
            const Eigen::VectorXd y = h.column(reg_dimension);
            const auto x = preference_features(b.matrix, s.subset, h);
            const auto grid = preference_lambda_grid();
            ProtocolReport rep;
            if (reg_protocol == "lomo") {
                detail::require(reg_baseline == "none", "--baseline applies to pairwise52 only");
                rep = preference_lomo(x, y, grid, reg_jobs);
            } else if (reg_protocol == "pairwise52") {
                std::optional<Eigen::VectorXd> baseline;
                if (reg_baseline != "none") {
                    detail::require(reg_baseline == "apw" || reg_baseline == "reference",
                                    "--baseline must be none, apw or reference");
                    baseline = Eigen::VectorXd(static_cast<Eigen::Index>(h.model_ids.size()));
                    for (std::size_t r = 0; r < h.model_ids.size(); ++r) {
                        const auto row = b.matrix.require_model(h.model_ids[r]);
                        (*baseline)(static_cast<Eigen::Index>(r)) =
                            reg_baseline == "apw" ? apw_score(b.matrix, s.subset, row) : reference_score(b.matrix, row);
                    }
                }
                rep = pairwise_52(x, y, grid, baseline, reg_jobs);
            } else {
                detail::fail("unknown protocol '" + reg_protocol + "'; valid protocols: lomo, pairwise52");
            }
            rep.model_ids = h.model_ids;
            const auto model = fit_preference_model(x, y, s.subset, grid);
            write_json(reg_out, {{"dimension", reg_dimension}, {"report", to_json(rep)}, {"model", to_json(model)}});
            const Json echo{{"bundle", base(reg_bundle)}, {"subset", base(reg_subset)}, {"ratings", base(reg_ratings)},
                            {"protocol", reg_protocol}, {"dimension", reg_dimension}, {"baseline", reg_baseline}};
            write_manifest(manifest_for(reg_out), "regress", echo, std::nullopt, {reg_bundle, reg_subset, reg_ratings},
                           {reg_out});
        } else if (exp->parsed()) {
            const auto b = load_bundle(exp_bundle);
            const auto s = selection_from_json(read_json_file(exp_subset));
            const auto h = load_ratings(exp_ratings);
            const auto dims = exp_dims.empty() ? h.dimensions : parse_list<std::string>(exp_dims, "--dimensions");
            const auto x = preference_features(b.matrix, s.subset, h);
            Release rel{s.subset, {}};
            for (const auto& d : dims) rel.regressors.emplace(d, fit_preference_model(x, h.column(d), s.subset));
            write_json(exp_out, to_json(rel));
            const Json echo{{"bundle", base(exp_bundle)}, {"subset", base(exp_subset)}, {"ratings", base(exp_ratings)},
                            {"dimensions", dims}};
            write_manifest(manifest_for(exp_out), "export", echo, std::nullopt, {exp_bundle, exp_subset, exp_ratings},
                           {exp_out});
        }
    } catch (const ValidationError& e) {
        return report_error(1, "validation", e.what());
    } catch (const InternalError& e) {
        return report_error(2, "internal", e.what());
    } catch (const std::exception& e) {
        return report_error(2, "internal", e.what());
    }
    return 0;
}
