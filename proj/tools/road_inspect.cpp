// road-inspect: batch CLI over the deflection-based PCI prediction library.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "roadinspect/artifact.hpp"
#include "roadinspect/baselines.hpp"
#include "roadinspect/metrics.hpp"
#include "roadinspect/pci.hpp"
#include "roadinspect/pipeline.hpp"
#include "roadinspect/provenance_io.hpp"

namespace ri = roadinspect;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool g_quiet = false;

void info(const std::string& msg) {
    if (!g_quiet) std::cout << msg << "\n";
}

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

std::string rebase(const std::string& path, const std::string& outdir) {
    if (outdir.empty()) return path;
    return outdir + "/" + fs::path(path).filename().string();
}

void print_metrics_table(const std::vector<ri::SplitMetrics>& rows) {
    if (g_quiet) return;
    std::printf("%-8s %-6s %5s %12s %12s %12s %12s\n", "model", "split", "n", "apre_pct",
                "aapre_pct", "rmse", "sd");
    for (const auto& r : rows)
        std::printf("%-8s %-6s %5zu %12.4f %12.4f %12.4f %12.6f\n", r.model.c_str(),
                    r.split.c_str(), r.n, r.apre_pct, r.aapre_pct, r.rmse, r.sd);
}

// --- command implementations (manifest-replayable) ----------------------------

void run_synth(const json& cfg, const std::string& outdir_override,
               const std::string& command_line) {
    const auto n = cfg.at("n").get<std::size_t>();
    const auto seed = cfg.at("seed").get<std::uint64_t>();
    const std::string out = rebase(cfg.at("out").get<std::string>(), outdir_override);
    ri::SynthParams params = cfg.contains("params")
                                 ? ri::synth_params_from_json(cfg.at("params"))
                                 : ri::SynthParams{};
    auto ds = ri::synth_generate(n, seed, params);
    if (auto dir = fs::path(out).parent_path(); !dir.empty()) fs::create_directories(dir);
    ri::write_csv(out, ds);
    ri::write_provenance_sidecar(out, ds);
    info("wrote " + out + " (" + std::to_string(n) + " segments) and provenance sidecar");

    ri::RunManifest m;
    m.command = "synth";
    m.command_line = command_line;
    m.config = cfg;
    m.config["out"] = out;
    m.config["params"] = ri::synth_params_to_json(params);
    m.outputs = {out, out + ".provenance.json"};
    const std::string mdir = fs::path(out).parent_path().empty()
                                 ? "."
                                 : fs::path(out).parent_path().string();
    ri::append_manifest(mdir, m);
}

void run_train(const json& cfg, const std::string& outdir_override,
               const std::string& command_line) {
    const std::string model = cfg.at("model").get<std::string>();
    const std::string data = cfg.at("data").get<std::string>();
    const std::string out = rebase(cfg.at("out").get<std::string>(), outdir_override);
    const auto seed = cfg.at("seed").get<std::uint64_t>();

    ri::Dataset ds = ri::load_csv(data);
    ri::Scaler scaler = ri::fit_scaler(ds);
    ri::TrainSet ts = ri::scale_dataset(ds, scaler);

    ri::ModelArtifact art;
    if (model == "mlp-lm" || model == "mlp-scg") {
        art = ri::train_mlp_artifact(model, ts, scaler,
                                     cfg.at("hidden").get<std::vector<std::size_t>>(),
                                     cfg.at("epochs").get<std::size_t>(), seed);
    } else if (model == "rbf-ga" || model == "rbf-ica") {
        art = ri::train_rbf_artifact(model, ts, scaler,
                                     cfg.at("neurons").get<std::size_t>(),
                                     cfg.at("spread").get<double>(),
                                     cfg.at("ridge").get<double>(),
                                     cfg.at("budget").get<std::size_t>(), seed);
    } else {
        ri::raise(ri::Errc::InvalidParams, "unknown model '" + model + "'");
    }
    if (auto dir = fs::path(out).parent_path(); !dir.empty()) fs::create_directories(dir);
    ri::save_artifact(out, art);
    info("trained " + model + " -> " + out);

    ri::RunManifest m;
    m.command = "train";
    m.command_line = command_line;
    m.config = cfg;
    m.config["out"] = out;
    m.input_digests[data] = ri::file_digest_hex(data);
    m.outputs = {out};
    const std::string mdir = fs::path(out).parent_path().empty()
                                 ? "."
                                 : fs::path(out).parent_path().string();
    ri::append_manifest(mdir, m);
}

void run_evaluate(const json& cfg, const std::string& outdir_override,
                  const std::string& command_line) {
    const auto model_paths = cfg.at("models").get<std::vector<std::string>>();
    const std::string train_path = cfg.at("train").get<std::string>();
    const std::string test_path = cfg.at("test").get<std::string>();
    const std::string outdir =
        outdir_override.empty() ? cfg.at("outdir").get<std::string>() : outdir_override;

    std::vector<ri::ModelArtifact> artifacts;
    for (const auto& p : model_paths) artifacts.push_back(ri::load_artifact(p));
    ri::Dataset train = ri::load_csv(train_path);
    ri::Dataset test = ri::load_csv(test_path);
    auto result = ri::evaluate_models(artifacts, train, test, outdir);
    print_metrics_table(result.rows);
    info("report written to " + outdir + "/report.csv");

    ri::RunManifest m;
    m.command = "evaluate";
    m.command_line = command_line;
    m.config = cfg;
    m.config["outdir"] = outdir;
    for (const auto& p : model_paths) m.input_digests[p] = ri::file_digest_hex(p);
    m.input_digests[train_path] = ri::file_digest_hex(train_path);
    m.input_digests[test_path] = ri::file_digest_hex(test_path);
    m.outputs = result.outputs;
    ri::append_manifest(outdir, m);
}

void run_ensemble_fit(const json& cfg, const std::string& outdir_override,
                      const std::string& command_line) {
    const std::string preds_path = cfg.at("preds").get<std::string>();
    const std::string out = rebase(cfg.at("out").get<std::string>(), outdir_override);
    const bool nonneg = cfg.at("nonneg").get<bool>();

    std::ifstream in(preds_path);
    if (!in) ri::raise(ri::Errc::IoError, "cannot open " + preds_path);
    std::string line;
    if (!std::getline(in, line)) ri::raise(ri::Errc::SchemaMismatch, "empty predictions file");
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line != "segment_id,mlp_lm,mlp_scg,rbf_ga,rbf_ica,observed")
        ri::raise(ri::Errc::SchemaMismatch,
                  "expected header 'segment_id,mlp_lm,mlp_scg,rbf_ga,rbf_ica,observed'");
    std::vector<std::array<double, 5>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');  // segment id unused by the fit
        std::array<double, 5> vals{};
        for (int k = 0; k < 5; ++k) {
            if (!std::getline(ss, field, ','))
                ri::raise(ri::Errc::SchemaMismatch,
                          "line " + std::to_string(line_no) + ": expected 6 columns");
            try {
                vals[static_cast<std::size_t>(k)] = std::stod(field);
            } catch (const std::exception&) {
                ri::raise(ri::Errc::ParseError,
                          "line " + std::to_string(line_no) + ": bad value '" + field + "'");
            }
        }
        rows.push_back(vals);
    }
    ri::Matrix preds(rows.size(), ri::kCmisInputs);
    std::vector<double> targets(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < ri::kCmisInputs; ++k) preds(i, k) = rows[i][k];
        targets[i] = rows[i][4];
    }
    auto fit = ri::fit_weights(preds, targets,
                               nonneg ? ri::CmisConstraint::NonNegative
                                      : ri::CmisConstraint::None);
    fit.model.fitted_on = preds_path;
    ri::ModelArtifact art;
    art.name = "cmis";
    art.config["constraint"] = nonneg ? "non-negative" : "none";
    art.config["train_rmse"] = fit.train_rmse;
    art.model = fit.model;
    if (auto dir = fs::path(out).parent_path(); !dir.empty()) fs::create_directories(dir);
    ri::save_artifact(out, art);
    info("committee fitted (train rmse " + ri::format_double(fit.train_rmse) + ") -> " + out);

    ri::RunManifest m;
    m.command = "ensemble-fit";
    m.command_line = command_line;
    m.config = cfg;
    m.config["out"] = out;
    m.input_digests[preds_path] = ri::file_digest_hex(preds_path);
    m.outputs = {out};
    const std::string mdir = fs::path(out).parent_path().empty()
                                 ? "."
                                 : fs::path(out).parent_path().string();
    ri::append_manifest(mdir, m);
}

void run_pipeline_cmd(const json& cfg_json, const std::string& outdir_override,
                      const std::string& command_line) {
    ri::PipelineConfig cfg = ri::PipelineConfig::from_json(cfg_json);
    if (!outdir_override.empty()) cfg.outdir = outdir_override;
    auto result = ri::run_pipeline(cfg);
    print_metrics_table(result.rows);
    if (!g_quiet) {
        std::printf("input impact:");
        for (std::size_t k = 0; k < ri::kNumGeophones; ++k)
            std::printf(" d%zu=%+.3f", k + 1, result.impact[k]);
        std::printf("\n");
    }
    info("outputs in " + cfg.outdir);

    ri::RunManifest m;
    m.command = "pipeline";
    m.command_line = command_line;
    m.config = cfg.to_json();
    m.input_digests[cfg.data_path] = ri::file_digest_hex(cfg.data_path);
    m.outputs = result.outputs;
    ri::append_manifest(cfg.outdir, m);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deflection-based pavement condition prediction toolkit"};
    app.require_subcommand(1);
    const std::string command_line = join_args(argc, argv);

    std::string config_path, global_outdir;
    app.add_option("--config", config_path, "JSON config file; explicit flags win");
    app.add_option("--outdir", global_outdir, "output directory override");
    app.add_flag("--quiet", g_quiet, "suppress progress output");
    std::uint64_t global_seed = 42;
    app.add_option("--seed", global_seed, "base seed for all randomness");

    json file_cfg = json::object();

    // pci compute
    auto* pci_cmd = app.add_subcommand("pci", "deduct-value PCI computation");
    auto* pci_compute = pci_cmd->add_subcommand("compute", "compute PCI from a survey CSV");
    std::string curves_path, survey_path, pci_out = "-";
    pci_compute->add_option("--curves", curves_path, "curve data file (JSON)")->required();
    pci_compute->add_option("--survey", survey_path, "survey CSV")->required();
    pci_compute->add_option("--out", pci_out, "output CSV ('-' for stdout)");

    // baseline
    auto* baseline = app.add_subcommand("baseline", "published closed-form PCI predictors");
    std::map<std::string, CLI::App*> baseline_subs;
    std::string baseline_json;
    for (const char* name : {"obrien", "park", "dewan", "michles"}) {
        auto* sub = baseline->add_subcommand(name);
        sub->add_option("--json", baseline_json, "inputs as a JSON object")->required();
        baseline_subs[name] = sub;
    }

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    std::size_t synth_n = 236;
    std::string synth_out = "synthetic.csv";
    double synth_noise = ri::SynthParams{}.noise_sd;
    synth->add_option("--n", synth_n, "segment count");
    synth->add_option("--out", synth_out, "output CSV path");
    synth->add_option("--noise-sd", synth_noise, "noise standard deviation in PCI units");

    // train
    auto* train = app.add_subcommand("train", "train one model on a dataset");
    std::string train_model, train_data, train_out = "model.json";
    std::vector<std::size_t> train_hidden = {10, 10, 10, 10};
    std::size_t train_epochs = 0;  // 0 = per-model default
    std::size_t train_neurons = 55, train_budget = 150;
    double train_spread = 0.37, train_ridge = 1e-8;
    train->add_option("--model", train_model, "mlp-lm|mlp-scg|rbf-ga|rbf-ica")->required();
    train->add_option("--data", train_data, "training CSV")->required();
    train->add_option("--out", train_out, "artifact path");
    train->add_option("--hidden", train_hidden, "hidden layer sizes")->delimiter(',');
    train->add_option("--epochs", train_epochs, "training epochs (MLP)");
    train->add_option("--neurons", train_neurons, "RBF centers");
    train->add_option("--spread", train_spread, "RBF spread (distribution coefficient)");
    train->add_option("--ridge", train_ridge, "RBF output-weight ridge");
    train->add_option("--budget", train_budget, "GA generations / ICA decades");

    // ensemble
    auto* ensemble = app.add_subcommand("ensemble", "committee machine");
    auto* ens_fit = ensemble->add_subcommand("fit", "fit weights from a predictions CSV");
    std::string ens_preds, ens_out = "cmis.json";
    bool ens_nonneg = false;
    ens_fit->add_option("--preds", ens_preds, "predictions CSV")->required();
    ens_fit->add_option("--out", ens_out, "artifact path");
    ens_fit->add_flag("--nonneg", ens_nonneg, "constrain slopes to be non-negative");
    auto* ens_combine = ensemble->add_subcommand("combine", "apply a committee to a dataset");
    std::vector<std::string> combine_models;
    std::string combine_cmis, combine_data, combine_out = "-";
    ens_combine->add_option("--models", combine_models, "the four component artifacts")
        ->expected(4);
    ens_combine->add_option("--cmis", combine_cmis, "committee artifact")->required();
    ens_combine->add_option("--data", combine_data, "dataset CSV")->required();
    ens_combine->add_option("--out", combine_out, "output CSV ('-' for stdout)");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Train/Test/Total metric report");
    std::vector<std::string> eval_models;
    std::string eval_train, eval_test, eval_outdir = "eval";
    evaluate->add_option("--models", eval_models, "model artifacts")->required();
    evaluate->add_option("--train", eval_train, "train CSV")->required();
    evaluate->add_option("--test", eval_test, "test CSV")->required();
    evaluate->add_option("--outdir", eval_outdir, "report directory");

    // bench
    auto* bench = app.add_subcommand("bench", "optimizer benchmark suite");
    std::string bench_optimizer = "both", bench_function = "sphere",
                bench_out = "bench.csv";
    std::size_t bench_dim = 5, bench_seeds = 20;
    bench->add_option("--optimizer", bench_optimizer, "ga|ica|both");
    bench->add_option("--function", bench_function, "sphere|rastrigin|rosenbrock|all");
    bench->add_option("--dim", bench_dim, "dimension");
    bench->add_option("--seeds", bench_seeds, "number of seeds");
    bench->add_option("--out", bench_out, "output CSV");

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "full train+ensemble+evaluate run");
    ri::PipelineConfig pcfg;
    pipeline->add_option("--data", pcfg.data_path, "dataset CSV")->required();
    pipeline->add_option("--test-fraction", pcfg.test_fraction, "test split fraction");
    pipeline->add_option("--hidden", pcfg.hidden_sizes, "MLP hidden sizes")->delimiter(',');
    pipeline->add_option("--lm-epochs", pcfg.lm_epochs, "LM epochs");
    pipeline->add_option("--scg-epochs", pcfg.scg_epochs, "SCG epochs");
    pipeline->add_option("--neurons", pcfg.rbf_centers, "RBF centers");
    pipeline->add_option("--spread", pcfg.rbf_spread, "RBF spread");
    pipeline->add_option("--ridge", pcfg.rbf_ridge, "RBF ridge");
    pipeline->add_option("--ga-generations", pcfg.ga_generations, "RBF-GA generations");
    pipeline->add_option("--ica-decades", pcfg.ica_decades, "RBF-ICA decades");
    pipeline->add_flag("--cmis-nonneg", pcfg.cmis_nonnegative,
                       "non-negative committee slopes");

    // rerun
    auto* rerun = app.add_subcommand("rerun", "re-execute a recorded manifest");
    std::string rerun_manifest;
    long rerun_index = -1;
    rerun->add_option("--manifest", rerun_manifest, "manifests.jsonl path")->required();
    rerun->add_option("--index", rerun_index, "entry index (negative counts from the end)");

    // config file defaults: applied before explicit flags by pre-scanning argv
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot open config " << config_path << "\n";
            return 2;
        }
        try {
            in >> file_cfg;
        } catch (const std::exception& e) {
            std::cerr << "error: bad config: " << e.what() << "\n";
            return 2;
        }
        auto num = [&](const char* key, auto& var) {
            if (file_cfg.contains(key)) var = file_cfg.at(key);
        };
        num("seed", global_seed);
        num("test_fraction", pcfg.test_fraction);
        num("lm_epochs", pcfg.lm_epochs);
        num("scg_epochs", pcfg.scg_epochs);
        num("neurons", pcfg.rbf_centers);
        num("spread", pcfg.rbf_spread);
        num("ridge", pcfg.rbf_ridge);
        num("ga_generations", pcfg.ga_generations);
        num("ica_decades", pcfg.ica_decades);
        num("cmis_nonnegative", pcfg.cmis_nonnegative);
        if (file_cfg.contains("hidden_sizes"))
            pcfg.hidden_sizes = file_cfg.at("hidden_sizes").get<std::vector<std::size_t>>();
    }

    // global flags may appear after the subcommand name
    for (auto* sub : app.get_subcommands({})) {
        sub->fallthrough();
        for (auto* nested : sub->get_subcommands({})) nested->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (*pci_compute) {
            auto curves = ri::DeductCurveSet::load_json(curves_path);
            auto survey = ri::load_survey_csv(survey_path);
            std::ostringstream csv;
            csv << "segment_id,pci,rating,max_cdv\n";
            for (const auto& [id, res] : ri::compute_pci_by_segment(curves, survey)) {
                csv << id << ',' << ri::format_double(res.pci) << ','
                    << ri::rating_name(res.rating) << ',' << ri::format_double(res.max_cdv)
                    << "\n";
            }
            if (pci_out == "-") {
                std::cout << csv.str();
            } else {
                std::ofstream out(pci_out);
                if (!out) ri::raise(ri::Errc::IoError, "cannot write " + pci_out);
                out << csv.str();
                info("wrote " + pci_out);
            }
        } else if (baseline->parsed()) {
            json in = json::parse(baseline_json);
            json out;
            if (*baseline_subs["obrien"]) {
                ri::ObrienInputs o;
                o.age = in.at("age").get<double>();
                o.age_to_overlay = in.at("age_to_overlay").get<double>();
                o.age_total = in.at("age_total").get<double>();
                o.log_traffic = in.at("log_traffic").get<double>();
                o.d0 = in.at("d0").get<double>();
                o.d12 = in.at("d12").get<double>();
                auto r = ri::obrien_pci(o);
                out = {{"raw", r.raw}, {"clamped", r.clamped}};
            } else if (*baseline_subs["park"]) {
                auto r = ri::make_raw_clamped(ri::park_pci(in.at("iri").get<double>()));
                out = {{"raw", r.raw}, {"clamped", r.clamped}};
            } else if (*baseline_subs["dewan"]) {
                auto r = ri::dewan_smith_pci(in.at("iri").get<double>());
                out = {{"raw", r.raw}, {"clamped", r.clamped}};
            } else if (*baseline_subs["michles"]) {
                auto r = ri::make_raw_clamped(ri::michles_pci(
                    in.at("treatment").get<int>(), in.at("age").get<double>()));
                out = {{"raw", r.raw}, {"clamped", r.clamped}};
            } else {
                std::cerr << "error: pick a baseline subcommand\n";
                return 2;
            }
            std::cout << out.dump() << "\n";
        } else if (*synth) {
            ri::SynthParams params;
            params.noise_sd = synth_noise;
            json cfg = {{"n", synth_n},
                        {"seed", global_seed},
                        {"out", synth_out},
                        {"params", ri::synth_params_to_json(params)}};
            run_synth(cfg, global_outdir, command_line);
        } else if (*train) {
            if (train_epochs == 0) train_epochs = train_model == "mlp-scg" ? 2000 : 200;
            json cfg = {{"model", train_model}, {"data", train_data},
                        {"out", train_out},     {"seed", global_seed},
                        {"hidden", train_hidden}, {"epochs", train_epochs},
                        {"neurons", train_neurons}, {"spread", train_spread},
                        {"ridge", train_ridge}, {"budget", train_budget}};
            run_train(cfg, global_outdir, command_line);
        } else if (*ens_fit) {
            json cfg = {{"preds", ens_preds}, {"out", ens_out}, {"nonneg", ens_nonneg}};
            run_ensemble_fit(cfg, global_outdir, command_line);
        } else if (*ens_combine) {
            std::map<std::string, ri::ModelArtifact> base;
            for (const auto& p : combine_models) {
                auto art = ri::load_artifact(p);
                base[art.name] = std::move(art);
            }
            for (const auto& name : ri::kModelOrder)
                if (!base.count(name))
                    ri::raise(ri::Errc::ArtifactMismatch, "missing component " + name);
            auto cmis_art = ri::load_artifact(combine_cmis);
            const auto& cm = std::get<ri::CmisModel>(cmis_art.model);
            auto ds = ri::load_csv(combine_data);
            std::ostringstream csv;
            csv << "segment_id,observed,mlp_lm,mlp_scg,rbf_ga,rbf_ica,cmis\n";
            for (const auto& s : ds.segments) {
                std::array<double, ri::kCmisInputs> p{};
                for (std::size_t k = 0; k < ri::kCmisInputs; ++k)
                    p[k] = ri::predict_pci(base[ri::kModelOrder[k]], s.deflections);
                csv << s.id << ',' << ri::format_double(s.pci);
                for (double v : p) csv << ',' << ri::format_double(v);
                csv << ',' << ri::format_double(ri::combine(cm, p)) << "\n";
            }
            if (combine_out == "-") {
                std::cout << csv.str();
            } else {
                std::ofstream out(combine_out);
                if (!out) ri::raise(ri::Errc::IoError, "cannot write " + combine_out);
                out << csv.str();
                info("wrote " + combine_out);
            }
        } else if (*evaluate) {
            json cfg = {{"models", eval_models},
                        {"train", eval_train},
                        {"test", eval_test},
                        {"outdir", eval_outdir}};
            run_evaluate(cfg, global_outdir, command_line);
        } else if (*bench) {
            std::vector<std::string> functions;
            if (bench_function == "all")
                functions = {"sphere", "rastrigin", "rosenbrock"};
            else
                functions = {bench_function};
            ri::GaConfig ga;
            ri::IcaConfig ica;
            auto rows = ri::benchmark_suite(functions, bench_dim, bench_seeds, ga, ica);
            std::ofstream out(bench_out);
            if (!out) ri::raise(ri::Errc::IoError, "cannot write " + bench_out);
            out << "optimizer,function,dim,seed,best_cost,threshold,success\n";
            std::map<std::string, std::pair<int, int>> rates;
            for (const auto& r : rows) {
                if (bench_optimizer != "both" && r.optimizer != bench_optimizer) continue;
                out << r.optimizer << ',' << r.function << ',' << r.dim << ',' << r.seed
                    << ',' << ri::format_double(r.best_cost) << ','
                    << ri::format_double(r.threshold) << ',' << (r.success ? 1 : 0) << "\n";
                auto& [ok, total] = rates[r.optimizer + "/" + r.function];
                ok += r.success ? 1 : 0;
                ++total;
            }
            const std::string summary_path =
                (fs::path(bench_out).parent_path() /
                 (fs::path(bench_out).stem().string() + "_rates.csv"))
                    .string();
            std::ofstream rates_out(summary_path);
            rates_out << "optimizer,function,dim,successes,seeds,success_rate\n";
            for (const auto& [key, rate] : rates) {
                const auto slash = key.find('/');
                rates_out << key.substr(0, slash) << ',' << key.substr(slash + 1) << ','
                          << bench_dim << ',' << rate.first << ',' << rate.second << ','
                          << ri::format_double(static_cast<double>(rate.first) /
                                               static_cast<double>(rate.second))
                          << "\n";
                info(key + ": " + std::to_string(rate.first) + "/" +
                     std::to_string(rate.second) + " under threshold");
            }
            info("wrote " + bench_out + " and " + summary_path);
        } else if (*pipeline) {
            pcfg.seed = global_seed;
            if (!global_outdir.empty()) pcfg.outdir = global_outdir;
            run_pipeline_cmd(pcfg.to_json(), "", command_line);
        } else if (*rerun) {
            auto m = ri::load_manifest(rerun_manifest, rerun_index);
            const std::string cmd = m.at("command").get<std::string>();
            const json cfg = m.at("config");
            info("re-executing " + cmd + " from manifest");
            if (cmd == "pipeline")
                run_pipeline_cmd(cfg, global_outdir, command_line);
            else if (cmd == "synth")
                run_synth(cfg, global_outdir, command_line);
            else if (cmd == "train")
                run_train(cfg, global_outdir, command_line);
            else if (cmd == "evaluate")
                run_evaluate(cfg, global_outdir, command_line);
            else if (cmd == "ensemble-fit")
                run_ensemble_fit(cfg, global_outdir, command_line);
            else
                ri::raise(ri::Errc::InvalidParams, "cannot rerun command '" + cmd + "'");
        }
    } catch (const ri::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
