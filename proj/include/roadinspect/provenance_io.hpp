#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "roadinspect/common.hpp"
#include "roadinspect/dataset.hpp"

namespace roadinspect {

inline nlohmann::json synth_params_to_json(const SynthParams& p) {
    nlohmann::json j;
    j["d7_min"] = p.d7_min;
    j["d7_range"] = p.d7_range;
    j["gap_min"] = p.gap_min;
    j["gap_range"] = p.gap_range;
    j["coef"] = p.coef;
    j["intercept"] = p.intercept;
    j["noise_sd"] = p.noise_sd;
    return j;
}

inline SynthParams synth_params_from_json(const nlohmann::json& j) {
    SynthParams p;
    p.d7_min = j.at("d7_min").get<double>();
    p.d7_range = j.at("d7_range").get<double>();
    auto gmin = j.at("gap_min").get<std::vector<double>>();
    auto grng = j.at("gap_range").get<std::vector<double>>();
    auto coef = j.at("coef").get<std::vector<double>>();
    if (gmin.size() != 6 || grng.size() != 6 || coef.size() != 7)
        raise(Errc::ParseError, "synth params arity");
    std::copy(gmin.begin(), gmin.end(), p.gap_min.begin());
    std::copy(grng.begin(), grng.end(), p.gap_range.begin());
    std::copy(coef.begin(), coef.end(), p.coef.begin());
    p.intercept = j.at("intercept").get<double>();
    p.noise_sd = j.at("noise_sd").get<double>();
    return p;
}

// Sidecar recording how a synthetic dataset was drawn; written next to the CSV.
inline void write_provenance_sidecar(const std::string& csv_path, const Dataset& ds) {
    nlohmann::json j;
    j["schema"] = "synth-provenance/1";
    j["kind"] = ds.provenance.kind == Provenance::Kind::Synthetic ? "synthetic" : "real";
    if (ds.provenance.kind == Provenance::Kind::Synthetic) {
        j["seed"] = ds.provenance.seed;
        j["n"] = ds.segments.size();
        j["generator"] = "decaying-gap-chain linear plant";
        j["params"] = synth_params_to_json(ds.provenance.params);
    }
    std::ofstream out(csv_path + ".provenance.json");
    if (!out) raise(Errc::IoError, "cannot write provenance sidecar");
    out << j.dump(2) << "\n";
}

}  // namespace roadinspect
