#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "roadinspect/artifact.hpp"
#include "roadinspect/common.hpp"
#include "roadinspect/dataset.hpp"
#include "roadinspect/ensemble.hpp"
#include "roadinspect/metrics.hpp"
#include "roadinspect/mlp.hpp"
#include "roadinspect/rbf.hpp"

namespace roadinspect {

inline constexpr const char* kToolVersion = "1.0.0";
inline const std::vector<std::string> kModelOrder = {"mlp-lm", "mlp-scg", "rbf-ga", "rbf-ica"};

// --- run manifests -----------------------------------------------------------

inline std::string file_digest_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::IoError, "cannot open " + path);
    std::uint64_t h = 1469598103934665603ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

// Appended to <outdir>/manifests.jsonl, one line per run; existing lines are
// never rewritten.
struct RunManifest {
    std::string command;
    std::string command_line;
    nlohmann::json config;
    std::map<std::string, std::string> input_digests;  // path -> fnv1a64 hex
    std::vector<std::string> outputs;
    double elapsed_seconds = 0.0;
};

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void append_manifest(const std::string& outdir, const RunManifest& m) {
    std::filesystem::create_directories(outdir);
    nlohmann::json j;
    j["tool"] = "road-inspect";
    j["version"] = kToolVersion;
    j["command"] = m.command;
    j["command_line"] = m.command_line;
    j["config"] = m.config;
    j["inputs"] = m.input_digests;
    j["outputs"] = m.outputs;
    j["elapsed_seconds"] = m.elapsed_seconds;
    j["wall_clock_utc"] = utc_timestamp();
    std::ofstream out(outdir + "/manifests.jsonl", std::ios::app);
    if (!out) raise(Errc::IoError, "cannot append to " + outdir + "/manifests.jsonl");
    out << j.dump() << "\n";
}

// index < 0 counts from the end (-1 = last run).
inline nlohmann::json load_manifest(const std::string& path, long index = -1) {
    std::ifstream in(path);
    if (!in) raise(Errc::IoError, "cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    if (lines.empty()) raise(Errc::ParseError, path + ": no manifests");
    long i = index < 0 ? static_cast<long>(lines.size()) + index : index;
    if (i < 0 || i >= static_cast<long>(lines.size()))
        raise(Errc::InvalidParams, "manifest index out of range");
    try {
        return nlohmann::json::parse(lines[static_cast<std::size_t>(i)]);
    } catch (const std::exception& e) {
        raise(Errc::ParseError, path + ": " + e.what());
    }
}

// --- pipeline configuration --------------------------------------------------

struct PipelineConfig {
    std::string data_path;
    std::string outdir = "out";
    std::uint64_t seed = 42;
    double test_fraction = 0.2;
    std::vector<std::size_t> hidden_sizes = {10, 10, 10, 10};
    std::size_t lm_epochs = 200;
    std::size_t scg_epochs = 2000;
    std::size_t rbf_centers = 55;
    double rbf_spread = 0.37;
    double rbf_ridge = 1e-8;
    std::size_t ga_generations = 150;
    std::size_t ica_decades = 150;
    bool cmis_nonnegative = false;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["data_path"] = data_path;
        j["outdir"] = outdir;
        j["seed"] = seed;
        j["test_fraction"] = test_fraction;
        j["hidden_sizes"] = hidden_sizes;
        j["lm_epochs"] = lm_epochs;
        j["scg_epochs"] = scg_epochs;
        j["rbf_centers"] = rbf_centers;
        j["rbf_spread"] = rbf_spread;
        j["rbf_ridge"] = rbf_ridge;
        j["ga_generations"] = ga_generations;
        j["ica_decades"] = ica_decades;
        j["cmis_nonnegative"] = cmis_nonnegative;
        return j;
    }

    static PipelineConfig from_json(const nlohmann::json& j) {
        PipelineConfig c;
        c.data_path = j.at("data_path").get<std::string>();
        c.outdir = j.at("outdir").get<std::string>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.test_fraction = j.at("test_fraction").get<double>();
        c.hidden_sizes = j.at("hidden_sizes").get<std::vector<std::size_t>>();
        c.lm_epochs = j.at("lm_epochs").get<std::size_t>();
        c.scg_epochs = j.at("scg_epochs").get<std::size_t>();
        c.rbf_centers = j.at("rbf_centers").get<std::size_t>();
        c.rbf_spread = j.at("rbf_spread").get<double>();
        c.rbf_ridge = j.at("rbf_ridge").get<double>();
        c.ga_generations = j.at("ga_generations").get<std::size_t>();
        c.ica_decades = j.at("ica_decades").get<std::size_t>();
        c.cmis_nonnegative = j.at("cmis_nonnegative").get<bool>();
        return c;
    }
};

// Default layer pattern at 4 hidden layers; other depths keep the one sigmoid
// in the second slot.
inline MlpArchitecture make_architecture(const std::vector<std::size_t>& hidden) {
    MlpArchitecture arch;
    arch.layer_sizes.push_back(kNumGeophones);
    for (std::size_t h : hidden) arch.layer_sizes.push_back(h);
    arch.layer_sizes.push_back(1);
    for (std::size_t i = 0; i < hidden.size(); ++i)
        arch.hidden_activations.push_back(i == 1 ? Activation::Sigmoid : Activation::Tansig);
    arch.validate();
    return arch;
}

// --- training entry points used by both the CLI and the pipeline -------------

inline ModelArtifact train_mlp_artifact(const std::string& name, const TrainSet& ts,
                                        const Scaler& scaler,
                                        const std::vector<std::size_t>& hidden,
                                        std::size_t epochs, std::uint64_t base_seed) {
    const std::uint64_t seed = derive_seed(base_seed, name);
    MlpArchitecture arch = make_architecture(hidden);
    MlpModel init = init_weights(arch, seed);
    init.scaler = scaler;
    TrainConfig cfg;
    cfg.max_epochs = epochs;
    cfg.loss_tolerance = 1e-8;
    cfg.seed = seed;
    auto [model, report] = name == "mlp-lm" ? train_lm(std::move(init), ts, cfg)
                                            : train_scg(std::move(init), ts, cfg);
    ModelArtifact art;
    art.name = name;
    art.seed = seed;
    art.config["hidden_sizes"] = hidden;
    art.config["max_epochs"] = epochs;
    art.config["loss_tolerance"] = cfg.loss_tolerance;
    art.config["final_train_loss"] = report.train_loss.back();
    art.config["epochs_run"] = report.epochs;
    art.config["termination"] = termination_name(report.reason);
    art.model = std::move(model);
    return art;
}

inline ModelArtifact train_rbf_artifact(const std::string& name, const TrainSet& ts,
                                        const Scaler& scaler, std::size_t n_centers,
                                        double spread, double ridge, std::size_t budget,
                                        std::uint64_t base_seed) {
    const std::uint64_t seed = derive_seed(base_seed, name);
    RbfTrainConfig cfg;
    cfg.n_centers = n_centers;
    cfg.spread_init = spread;
    cfg.ridge = ridge;
    cfg.seed = seed;
    if (name == "rbf-ga") {
        cfg.optimizer = RbfOptimizer::Ga;
        cfg.ga.generations = budget;
    } else {
        cfg.optimizer = RbfOptimizer::Ica;
        cfg.ica.max_decades = budget;
    }
    RbfTrainResult res = train_rbf(ts, cfg);
    res.model.scaler = scaler;
    ModelArtifact art;
    art.name = name;
    art.seed = seed;
    art.config["n_centers"] = n_centers;
    art.config["spread_init"] = spread;
    art.config["ridge"] = ridge;
    art.config["budget"] = budget;
    art.config["best_fitness"] = res.trace.best_cost;
    art.config["stop"] = stop_name(res.trace.reason);
    art.model = std::move(res.model);
    return art;
}

// --- evaluation ---------------------------------------------------------------

struct EvaluationResult {
    std::vector<SplitMetrics> rows;
    std::vector<std::string> outputs;  // files written
};

namespace detail {

inline std::vector<double> predict_all(const ModelArtifact& art, const Dataset& ds) {
    std::vector<double> out;
    out.reserve(ds.size());
    for (const auto& s : ds.segments) out.push_back(predict_pci(art, s.deflections));
    return out;
}

}  // namespace detail

// Evaluates base artifacts (and an optional CMIS artifact combining them) on
// the Train/Test/Total splits, writing the report table and per-model plot
// data over the Total concatenation.
inline EvaluationResult evaluate_models(const std::vector<ModelArtifact>& artifacts,
                                        const Dataset& train, const Dataset& test,
                                        const std::string& outdir) {
    std::filesystem::create_directories(outdir);
    std::vector<double> obs_train, obs_test, obs_total;
    for (const auto& s : train.segments) obs_train.push_back(s.pci);
    for (const auto& s : test.segments) obs_test.push_back(s.pci);
    obs_total = obs_train;
    obs_total.insert(obs_total.end(), obs_test.begin(), obs_test.end());

    const ModelArtifact* cmis_art = nullptr;
    std::map<std::string, const ModelArtifact*> base;
    for (const auto& a : artifacts) {
        if (std::string(a.kind()) == "cmis") {
            if (cmis_art) raise(Errc::ArtifactMismatch, "more than one cmis artifact");
            cmis_art = &a;
        } else {
            base[a.name] = &a;
        }
    }
    if (cmis_art)
        for (const auto& name : kModelOrder)
            if (!base.count(name))
                raise(Errc::ArtifactMismatch,
                      "cmis evaluation needs all four component artifacts; missing " + name);

    EvaluationResult result;
    std::map<std::string, std::vector<double>> pred_train, pred_test;
    std::vector<std::string> eval_order;
    for (const auto& name : kModelOrder)
        if (base.count(name)) eval_order.push_back(name);
    for (const auto& [name, art] : base)
        if (std::find(eval_order.begin(), eval_order.end(), name) == eval_order.end())
            eval_order.push_back(name);

    for (const auto& name : eval_order) {
        pred_train[name] = detail::predict_all(*base[name], train);
        pred_test[name] = detail::predict_all(*base[name], test);
    }
    if (cmis_art) {
        const auto& cm = std::get<CmisModel>(cmis_art->model);
        auto combine_rows = [&](const std::map<std::string, std::vector<double>>& preds,
                                std::size_t n) {
            std::vector<double> out(n);
            for (std::size_t i = 0; i < n; ++i) {
                std::array<double, kCmisInputs> p{};
                for (std::size_t k = 0; k < kCmisInputs; ++k)
                    p[k] = preds.at(kModelOrder[k])[i];
                out[i] = combine(cm, p);
            }
            return out;
        };
        pred_train["cmis"] = combine_rows(pred_train, train.size());
        pred_test["cmis"] = combine_rows(pred_test, test.size());
        eval_order.push_back("cmis");
    }

    for (const auto& name : eval_order) {
        std::vector<double> total = pred_train[name];
        total.insert(total.end(), pred_test[name].begin(), pred_test[name].end());
        result.rows.push_back(compute_split_metrics(name, "Train", obs_train, pred_train[name]));
        result.rows.push_back(compute_split_metrics(name, "Test", obs_test, pred_test[name]));
        result.rows.push_back(compute_split_metrics(name, "Total", obs_total, total));
        const std::string cross = outdir + "/crossplot_" + name + ".csv";
        const std::string rel = outdir + "/relerr_" + name + ".csv";
        const std::string cum = outdir + "/cumfreq_" + name + ".csv";
        write_crossplot_csv(cross, obs_total, total);
        write_relerr_csv(rel, obs_total, total);
        write_cumfreq_csv(cum, obs_total, total);
        result.outputs.insert(result.outputs.end(), {cross, rel, cum});
    }
    const std::string report = outdir + "/report.csv";
    write_metrics_csv(report, result.rows);
    result.outputs.push_back(report);
    return result;
}

// --- full pipeline -------------------------------------------------------------

struct PipelineResult {
    std::vector<SplitMetrics> rows;
    std::array<double, kNumGeophones> impact{};
    std::vector<std::string> outputs;
    std::vector<ModelArtifact> artifacts;
};

// split -> scale -> train the four hybrids -> fit the committee on train
// predictions -> evaluate everything on Train/Test/Total.
inline PipelineResult run_pipeline(const PipelineConfig& cfg) {
    std::string stage = "load";
    try {
        Dataset data = load_csv(cfg.data_path);

        stage = "split";
        auto [train, test] = split(data, cfg.test_fraction, derive_seed(cfg.seed, "split"));

        stage = "scale";
        Scaler scaler = fit_scaler(train);
        TrainSet ts = scale_dataset(train, scaler);

        std::filesystem::create_directories(cfg.outdir);
        write_csv(cfg.outdir + "/train.csv", train);
        write_csv(cfg.outdir + "/test.csv", test);

        PipelineResult result;
        result.outputs = {cfg.outdir + "/train.csv", cfg.outdir + "/test.csv"};

        stage = "train";
        result.artifacts.push_back(train_mlp_artifact("mlp-lm", ts, scaler, cfg.hidden_sizes,
                                                      cfg.lm_epochs, cfg.seed));
        result.artifacts.push_back(train_mlp_artifact("mlp-scg", ts, scaler, cfg.hidden_sizes,
                                                      cfg.scg_epochs, cfg.seed));
        result.artifacts.push_back(train_rbf_artifact("rbf-ga", ts, scaler, cfg.rbf_centers,
                                                      cfg.rbf_spread, cfg.rbf_ridge,
                                                      cfg.ga_generations, cfg.seed));
        result.artifacts.push_back(train_rbf_artifact("rbf-ica", ts, scaler, cfg.rbf_centers,
                                                      cfg.rbf_spread, cfg.rbf_ridge,
                                                      cfg.ica_decades, cfg.seed));

        stage = "ensemble";
        Matrix preds(train.size(), kCmisInputs);
        std::vector<double> targets;
        for (const auto& s : train.segments) targets.push_back(s.pci);
        for (std::size_t k = 0; k < kCmisInputs; ++k) {
            auto col = detail::predict_all(result.artifacts[k], train);
            for (std::size_t i = 0; i < train.size(); ++i) preds(i, k) = col[i];
        }
        CmisFit fit = fit_weights(preds, targets,
                                  cfg.cmis_nonnegative ? CmisConstraint::NonNegative
                                                       : CmisConstraint::None);
        fit.model.fitted_on = cfg.data_path + " (train split, seed " +
                              std::to_string(cfg.seed) + ")";
        ModelArtifact cmis_art;
        cmis_art.name = "cmis";
        cmis_art.seed = cfg.seed;
        cmis_art.config["constraint"] = cfg.cmis_nonnegative ? "non-negative" : "none";
        cmis_art.config["train_rmse"] = fit.train_rmse;
        cmis_art.model = fit.model;
        result.artifacts.push_back(std::move(cmis_art));

        stage = "save-artifacts";
        for (const auto& art : result.artifacts) {
            const std::string path = cfg.outdir + "/" + art.name + ".json";
            save_artifact(path, art);
            result.outputs.push_back(path);
        }
        {
            // committee input predictions, reusable by `ensemble fit`
            std::ofstream out(cfg.outdir + "/train_predictions.csv");
            if (!out) raise(Errc::IoError, "cannot write train_predictions.csv");
            out << "segment_id,mlp_lm,mlp_scg,rbf_ga,rbf_ica,observed\n";
            for (std::size_t i = 0; i < train.size(); ++i) {
                out << train.segments[i].id;
                for (std::size_t k = 0; k < kCmisInputs; ++k)
                    out << ',' << format_double(preds(i, k));
                out << ',' << format_double(targets[i]) << "\n";
            }
            result.outputs.push_back(cfg.outdir + "/train_predictions.csv");
        }

        stage = "evaluate";
        EvaluationResult eval = evaluate_models(result.artifacts, train, test, cfg.outdir);
        result.rows = std::move(eval.rows);
        result.outputs.insert(result.outputs.end(), eval.outputs.begin(), eval.outputs.end());

        stage = "impact";
        result.impact = input_impact(data);
        {
            std::ofstream out(cfg.outdir + "/impact.csv");
            if (!out) raise(Errc::IoError, "cannot write impact.csv");
            out << "geophone,impact\n";
            for (std::size_t k = 0; k < kNumGeophones; ++k)
                out << "d" << (k + 1) << ',' << format_double(result.impact[k]) << "\n";
            result.outputs.push_back(cfg.outdir + "/impact.csv");
        }
        return result;
    } catch (const Error& e) {
        throw Error(e.code(), "stage " + stage + ": " + e.message());
    }
}

}  // namespace roadinspect
