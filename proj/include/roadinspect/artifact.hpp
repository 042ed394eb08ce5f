#pragma once

#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "roadinspect/common.hpp"
#include "roadinspect/dataset.hpp"
#include "roadinspect/ensemble.hpp"
#include "roadinspect/mlp.hpp"
#include "roadinspect/rbf.hpp"

namespace roadinspect {

inline constexpr const char* kArtifactFormat = "road-inspect-model/1";

// One trained model plus everything needed to reproduce and apply it.
struct ModelArtifact {
    std::string name;  // mlp-lm | mlp-scg | rbf-ga | rbf-ica | cmis
    std::uint64_t seed = 0;
    nlohmann::json config;  // training configuration snapshot
    std::variant<MlpModel, RbfModel, CmisModel> model;

    const char* kind() const {
        if (std::holds_alternative<MlpModel>(model)) return "mlp";
        if (std::holds_alternative<RbfModel>(model)) return "rbf";
        return "cmis";
    }
};

namespace detail {

inline nlohmann::json scaler_to_json(const Scaler& s) {
    nlohmann::json j;
    j["input_min"] = s.in_min;
    j["input_max"] = s.in_max;
    j["target_min"] = s.target_min;
    j["target_max"] = s.target_max;
    return j;
}

inline Scaler scaler_from_json(const nlohmann::json& j) {
    Scaler s;
    auto lo = j.at("input_min").get<std::vector<double>>();
    auto hi = j.at("input_max").get<std::vector<double>>();
    if (lo.size() != kNumGeophones || hi.size() != kNumGeophones)
        raise(Errc::ArtifactMismatch, "scaler arity");
    std::copy(lo.begin(), lo.end(), s.in_min.begin());
    std::copy(hi.begin(), hi.end(), s.in_max.begin());
    s.target_min = j.at("target_min").get<double>();
    s.target_max = j.at("target_max").get<double>();
    return s;
}

}  // namespace detail

inline void save_artifact(const std::string& path, const ModelArtifact& art) {
    nlohmann::json j;
    j["format"] = kArtifactFormat;
    j["kind"] = art.kind();
    j["name"] = art.name;
    j["seed"] = art.seed;
    j["config"] = art.config;
    if (const auto* mlp = std::get_if<MlpModel>(&art.model)) {
        nlohmann::json m;
        m["layer_sizes"] = mlp->arch.layer_sizes;
        std::vector<std::string> acts;
        for (auto a : mlp->arch.hidden_activations) acts.emplace_back(activation_name(a));
        m["activations"] = acts;
        m["parameters"] = mlp->flatten();
        j["mlp"] = std::move(m);
        j["scaler"] = detail::scaler_to_json(mlp->scaler);
    } else if (const auto* rbf = std::get_if<RbfModel>(&art.model)) {
        nlohmann::json m;
        m["n_centers"] = rbf->centers.rows;
        m["input_dim"] = rbf->centers.cols;
        m["centers"] = rbf->centers.a;
        m["spread"] = rbf->spread;
        m["weights"] = rbf->weights;
        m["bias"] = rbf->bias;
        j["rbf"] = std::move(m);
        j["scaler"] = detail::scaler_to_json(rbf->scaler);
    } else {
        const auto& cmis = std::get<CmisModel>(art.model);
        nlohmann::json m;
        m["coefficients"] = cmis.coefficients;
        m["fitted_on"] = cmis.fitted_on;
        m["components"] =
            std::vector<std::string>{"mlp-lm", "mlp-scg", "rbf-ga", "rbf-ica"};
        j["cmis"] = std::move(m);
    }
    std::ofstream out(path);
    if (!out) raise(Errc::IoError, "cannot write " + path);
    out << j.dump(2) << "\n";
}

inline ModelArtifact load_artifact(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::IoError, "cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        raise(Errc::ParseError, path + ": " + e.what());
    }
    if (!j.contains("format") || j["format"] != kArtifactFormat)
        raise(Errc::ArtifactMismatch, path + ": expected format " + kArtifactFormat);
    ModelArtifact art;
    art.name = j.value("name", "");
    art.seed = j.value("seed", 0ull);
    art.config = j.value("config", nlohmann::json::object());
    const std::string kind = j.at("kind").get<std::string>();
    try {
        if (kind == "mlp") {
            MlpModel m;
            m.arch.layer_sizes = j.at("mlp").at("layer_sizes").get<std::vector<std::size_t>>();
            for (const auto& s : j.at("mlp").at("activations"))
                m.arch.hidden_activations.push_back(parse_activation(s.get<std::string>()));
            m.arch.validate();
            for (std::size_t l = 0; l + 1 < m.arch.layer_sizes.size(); ++l) {
                m.weights.emplace_back(m.arch.layer_sizes[l + 1], m.arch.layer_sizes[l]);
                m.biases.emplace_back(m.arch.layer_sizes[l + 1], 0.0);
            }
            auto params = j.at("mlp").at("parameters").get<std::vector<double>>();
            m.unflatten(params);
            m.scaler = detail::scaler_from_json(j.at("scaler"));
            art.model = std::move(m);
        } else if (kind == "rbf") {
            RbfModel m;
            const std::size_t n = j.at("rbf").at("n_centers").get<std::size_t>();
            const std::size_t d = j.at("rbf").at("input_dim").get<std::size_t>();
            m.centers = Matrix(n, d);
            auto flat = j.at("rbf").at("centers").get<std::vector<double>>();
            if (flat.size() != n * d) raise(Errc::ArtifactMismatch, "centers arity");
            m.centers.a = std::move(flat);
            m.spread = j.at("rbf").at("spread").get<double>();
            m.weights = j.at("rbf").at("weights").get<std::vector<double>>();
            m.bias = j.at("rbf").at("bias").get<double>();
            m.validate();
            m.scaler = detail::scaler_from_json(j.at("scaler"));
            art.model = std::move(m);
        } else if (kind == "cmis") {
            CmisModel m;
            auto c = j.at("cmis").at("coefficients").get<std::vector<double>>();
            if (c.size() != m.coefficients.size()) raise(Errc::ArtifactMismatch, "cmis arity");
            std::copy(c.begin(), c.end(), m.coefficients.begin());
            m.fitted_on = j.at("cmis").value("fitted_on", "");
            art.model = std::move(m);
        } else {
            raise(Errc::ArtifactMismatch, path + ": unknown kind '" + kind + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::ParseError, path + ": " + e.what());
    }
    return art;
}

// Prediction on raw (unscaled) deflections for any single-basin model kind.
inline double predict_pci(const ModelArtifact& art,
                          const std::array<double, kNumGeophones>& raw) {
    if (const auto* mlp = std::get_if<MlpModel>(&art.model)) return predict_pci(*mlp, raw);
    if (const auto* rbf = std::get_if<RbfModel>(&art.model)) return predict_pci(*rbf, raw);
    raise(Errc::ArtifactMismatch, "cmis artifacts combine other models' predictions");
}

}  // namespace roadinspect
