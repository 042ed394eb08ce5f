#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "roadinspect/common.hpp"

namespace roadinspect {

enum class Severity { Low, Medium, High };

inline const char* severity_name(Severity s) {
    switch (s) {
        case Severity::Low: return "low";
        case Severity::Medium: return "medium";
        case Severity::High: return "high";
    }
    return "?";
}

inline Severity parse_severity(const std::string& s) {
    if (s == "low" || s == "Low" || s == "L") return Severity::Low;
    if (s == "medium" || s == "Medium" || s == "M") return Severity::Medium;
    if (s == "high" || s == "High" || s == "H") return Severity::High;
    raise(Errc::ParseError, "unknown severity '" + s + "'");
}

enum class ConditionRating { Failed, Serious, VeryPoor, Poor, Fair, Satisfactory, Good };

inline const char* rating_name(ConditionRating r) {
    switch (r) {
        case ConditionRating::Failed: return "Failed";
        case ConditionRating::Serious: return "Serious";
        case ConditionRating::VeryPoor: return "VeryPoor";
        case ConditionRating::Poor: return "Poor";
        case ConditionRating::Fair: return "Fair";
        case ConditionRating::Satisfactory: return "Satisfactory";
        case ConditionRating::Good: return "Good";
    }
    return "?";
}

enum class MaintenanceProgram {
    RoutineMaintenance,
    MinorRehabilitation,
    MajorRehabilitation,
    Reconstruction
};

inline const char* program_name(MaintenanceProgram p) {
    switch (p) {
        case MaintenanceProgram::RoutineMaintenance: return "RoutineMaintenance";
        case MaintenanceProgram::MinorRehabilitation: return "MinorRehabilitation";
        case MaintenanceProgram::MajorRehabilitation: return "MajorRehabilitation";
        case MaintenanceProgram::Reconstruction: return "Reconstruction";
    }
    return "?";
}

// One surveyed distress instance.
struct DistressRecord {
    std::string distress_kind;
    Severity severity = Severity::Low;
    double density_percent = 0.0;  // fraction of sample-unit area affected, [0, 100]
};

// Deduct curve: knots (density %, DV), interpolated linearly in log10(density),
// clamped to the end knots outside the tabulated range. Density 0 deducts 0.
struct DeductCurve {
    std::vector<std::pair<double, double>> knots;

    double eval(double density) const {
        if (density == 0.0) return 0.0;
        const double x = std::log10(density);
        const double x0 = std::log10(knots.front().first);
        const double xn = std::log10(knots.back().first);
        if (x <= x0) return knots.front().second;
        if (x >= xn) return knots.back().second;
        for (std::size_t i = 1; i < knots.size(); ++i) {
            const double xi = std::log10(knots[i].first);
            if (x <= xi) {
                const double xp = std::log10(knots[i - 1].first);
                const double t = (x - xp) / (xi - xp);
                return clamp(knots[i - 1].second + t * (knots[i].second - knots[i - 1].second),
                             0.0, 100.0);
            }
        }
        return knots.back().second;
    }
};

// Correction curve for one q: knots (TDV, CDV), linear in TDV, output clamped
// to [0, 100] and to the end knots outside the tabulated range.
struct CorrectionCurve {
    std::vector<std::pair<double, double>> knots;

    double eval(double tdv) const {
        if (tdv <= knots.front().first) return clamp(knots.front().second, 0.0, 100.0);
        if (tdv >= knots.back().first) return clamp(knots.back().second, 0.0, 100.0);
        for (std::size_t i = 1; i < knots.size(); ++i) {
            if (tdv <= knots[i].first) {
                const double t =
                    (tdv - knots[i - 1].first) / (knots[i].first - knots[i - 1].first);
                return clamp(
                    knots[i - 1].second + t * (knots[i].second - knots[i - 1].second), 0.0,
                    100.0);
            }
        }
        return clamp(knots.back().second, 0.0, 100.0);
    }
};

struct DeductCurveSet {
    std::map<std::pair<std::string, Severity>, DeductCurve> deduct;
    std::map<int, CorrectionCurve> correction;

    void validate() const;
    static DeductCurveSet load_json(const std::string& path);
    void save_json(const std::string& path, const std::string& name = "curves") const;
};

namespace detail {

inline void validate_deduct_curve(const DeductCurve& c, const std::string& where) {
    require(!c.knots.empty(), Errc::InvariantViolation, where + ": empty curve");
    double prev_x = 0.0, prev_v = -1.0;
    for (const auto& [x, v] : c.knots) {
        require(x > 0.0 && x <= 100.0, Errc::InvariantViolation,
                where + ": density knots must lie in (0, 100]");
        require(x > prev_x, Errc::InvariantViolation, where + ": densities must increase");
        require(v >= 0.0 && v <= 100.0, Errc::InvariantViolation,
                where + ": deduct values must lie in [0, 100]");
        require(v >= prev_v, Errc::InvariantViolation, where + ": curve must be non-decreasing");
        prev_x = x;
        prev_v = v;
    }
}

inline void validate_correction_curve(const CorrectionCurve& c, const std::string& where) {
    require(c.knots.size() >= 2, Errc::InvariantViolation, where + ": need at least 2 knots");
    double prev_x = -1.0, prev_v = -1.0;
    for (const auto& [x, v] : c.knots) {
        require(x >= 0.0, Errc::InvariantViolation, where + ": TDV knots must be >= 0");
        require(x > prev_x, Errc::InvariantViolation, where + ": TDV knots must increase");
        require(v >= 0.0 && v <= 100.0, Errc::InvariantViolation,
                where + ": CDV must lie in [0, 100]");
        require(v >= prev_v, Errc::InvariantViolation, where + ": curve must be non-decreasing");
        prev_x = x;
        prev_v = v;
    }
}

}  // namespace detail

inline void DeductCurveSet::validate() const {
    for (const auto& [key, curve] : deduct)
        detail::validate_deduct_curve(curve, key.first + "/" + severity_name(key.second));
    for (const auto& [q, curve] : correction) {
        require(q >= 1, Errc::InvariantViolation, "correction curve q must be >= 1");
        detail::validate_correction_curve(curve, "correction q=" + std::to_string(q));
    }
    // q = 1 must be the identity on [0, 100]
    if (auto it = correction.find(1); it != correction.end()) {
        for (double tdv : {0.0, 13.7, 25.0, 50.0, 77.3, 100.0})
            require(std::abs(it->second.eval(tdv) - tdv) < 1e-9, Errc::InvariantViolation,
                    "correction q=1 must be the identity on [0, 100]");
    }
    // ordering: lower q never corrects below higher q
    for (auto a = correction.begin(); a != correction.end(); ++a) {
        auto b = std::next(a);
        if (b == correction.end()) break;
        for (const auto& [x, v] : a->second.knots)
            require(a->second.eval(x) >= b->second.eval(x) - 1e-9, Errc::InvariantViolation,
                    "correction curves must be ordered in q");
        for (const auto& [x, v] : b->second.knots)
            require(a->second.eval(x) >= b->second.eval(x) - 1e-9, Errc::InvariantViolation,
                    "correction curves must be ordered in q");
    }
}

inline DeductCurveSet DeductCurveSet::load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::IoError, "cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        raise(Errc::ParseError, path + ": " + e.what());
    }
    if (!j.contains("schema") || j["schema"] != "pci-curves/1")
        raise(Errc::SchemaMismatch, path + ": expected schema pci-curves/1");
    DeductCurveSet cs;
    try {
        for (const auto& entry : j.at("deduct_curves")) {
            DeductCurve c;
            for (const auto& knot : entry.at("knots"))
                c.knots.emplace_back(knot.at(0).get<double>(), knot.at(1).get<double>());
            cs.deduct[{entry.at("distress").get<std::string>(),
                       parse_severity(entry.at("severity").get<std::string>())}] = std::move(c);
        }
        for (const auto& entry : j.at("correction_curves")) {
            CorrectionCurve c;
            for (const auto& knot : entry.at("knots"))
                c.knots.emplace_back(knot.at(0).get<double>(), knot.at(1).get<double>());
            cs.correction[entry.at("q").get<int>()] = std::move(c);
        }
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::ParseError, path + ": " + e.what());
    }
    cs.validate();
    return cs;
}

inline void DeductCurveSet::save_json(const std::string& path, const std::string& name) const {
    nlohmann::json j;
    j["schema"] = "pci-curves/1";
    j["name"] = name;
    j["deduct_curves"] = nlohmann::json::array();
    for (const auto& [key, curve] : deduct) {
        nlohmann::json e;
        e["distress"] = key.first;
        e["severity"] = severity_name(key.second);
        e["knots"] = nlohmann::json::array();
        for (const auto& [x, v] : curve.knots) e["knots"].push_back({x, v});
        j["deduct_curves"].push_back(std::move(e));
    }
    j["correction_curves"] = nlohmann::json::array();
    for (const auto& [q, curve] : correction) {
        nlohmann::json e;
        e["q"] = q;
        e["knots"] = nlohmann::json::array();
        for (const auto& [x, v] : curve.knots) e["knots"].push_back({x, v});
        j["correction_curves"].push_back(std::move(e));
    }
    std::ofstream out(path);
    if (!out) raise(Errc::IoError, "cannot write " + path);
    out << j.dump(2) << "\n";
}

struct PciIteration {
    int q = 0;
    double tdv = 0.0;
    double cdv = 0.0;
};

struct PciResult {
    double pci = 100.0;
    double max_cdv = 0.0;
    std::vector<PciIteration> iterations;
    ConditionRating rating = ConditionRating::Good;
    std::vector<double> deduct_values;  // after the max-allowable truncation
};

inline double lookup_deduct(const DeductCurveSet& curves, const DistressRecord& record) {
    if (!(record.density_percent >= 0.0 && record.density_percent <= 100.0))
        raise(Errc::InvalidDensity,
              record.distress_kind + ": density " + format_double(record.density_percent));
    auto it = curves.deduct.find({record.distress_kind, record.severity});
    if (it == curves.deduct.end())
        raise(Errc::UnknownDistress,
              record.distress_kind + "/" + severity_name(record.severity));
    return it->second.eval(record.density_percent);
}

// Maximum allowable number of deduct values, m = 1 + (100 - HDV)*9/98, capped at 10.
inline double max_allowable_deducts(double hdv) {
    if (!(hdv >= 0.0 && hdv <= 100.0)) raise(Errc::InvalidDeduct, "HDV must be in [0, 100]");
    return std::min(10.0, 1.0 + (100.0 - hdv) * 9.0 / 98.0);
}

inline double corrected_deduct(const DeductCurveSet& curves, int q, double tdv) {
    require(q >= 1, Errc::InvalidParams, "q must be >= 1");
    require(tdv >= 0.0, Errc::InvalidParams, "TDV must be >= 0");
    auto it = curves.correction.find(q);
    if (it == curves.correction.end())
        raise(Errc::MissingCorrectionCurve, "q=" + std::to_string(q));
    return it->second.eval(tdv);
}

// Keeps the floor(m) largest DVs at full value and scales the next-largest by
// frac(m). Ties at the cutoff keep earlier records; output preserves input order.
inline std::vector<double> cap_deduct_values(const std::vector<double>& dvs, double m) {
    const auto whole = static_cast<std::size_t>(std::floor(m));
    if (dvs.size() <= whole) return dvs;
    std::vector<std::size_t> order(dvs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dvs[a] > dvs[b]; });
    const double frac = m - std::floor(m);
    std::vector<double> scaled(dvs.size(), -1.0);  // -1 marks dropped
    for (std::size_t r = 0; r < whole; ++r) scaled[order[r]] = dvs[order[r]];
    if (frac > 0.0) scaled[order[whole]] = frac * dvs[order[whole]];
    std::vector<double> out;
    out.reserve(whole + 1);
    for (double v : scaled)
        if (v >= 0.0) out.push_back(v);
    return out;
}

// Table-4 bands, half-open below, top band closed at 100.
inline ConditionRating rate_condition(double pci) {
    if (!(pci >= 0.0 && pci <= 100.0)) raise(Errc::OutOfRange, "PCI must be in [0, 100]");
    if (pci < 10.0) return ConditionRating::Failed;
    if (pci < 25.0) return ConditionRating::Serious;
    if (pci < 40.0) return ConditionRating::VeryPoor;
    if (pci < 55.0) return ConditionRating::Poor;
    if (pci < 70.0) return ConditionRating::Fair;
    if (pci < 85.0) return ConditionRating::Satisfactory;
    return ConditionRating::Good;
}

inline MaintenanceProgram maintenance_program(double damage_percent) {
    if (!(damage_percent >= 0.0)) raise(Errc::NegativeDamage, "damage must be >= 0");
    if (damage_percent < 6.0) return MaintenanceProgram::RoutineMaintenance;
    if (damage_percent < 11.0) return MaintenanceProgram::MinorRehabilitation;
    if (damage_percent < 15.0) return MaintenanceProgram::MajorRehabilitation;
    return MaintenanceProgram::Reconstruction;
}

// One row of a distress survey file.
struct SurveyRow {
    std::string segment_id;
    DistressRecord record;
};

// Survey CSV: header segment_id,distress_kind,severity,density_percent.
inline std::vector<SurveyRow> load_survey_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::IoError, "cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) raise(Errc::SchemaMismatch, "empty survey file " + path);
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line != "segment_id,distress_kind,severity,density_percent")
        raise(Errc::SchemaMismatch,
              "expected header 'segment_id,distress_kind,severity,density_percent'");
    std::vector<SurveyRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur.push_back(c);
            }
        }
        fields.push_back(cur);
        if (fields.size() != 4)
            raise(Errc::SchemaMismatch,
                  "line " + std::to_string(line_no) + ": expected 4 columns, got " +
                      std::to_string(fields.size()));
        SurveyRow row;
        row.segment_id = fields[0];
        row.record.distress_kind = fields[1];
        row.record.severity = parse_severity(fields[2]);
        const char* first = fields[3].data();
        const char* last = first + fields[3].size();
        auto res = std::from_chars(first, last, row.record.density_percent);
        if (res.ec != std::errc() || res.ptr != last)
            raise(Errc::ParseError,
                  "line " + std::to_string(line_no) + ": bad density '" + fields[3] + "'");
        rows.push_back(std::move(row));
    }
    return rows;
}

// Full deduct-value procedure: DVs, the allowable-count cap, then the
// iterate-and-correct loop until at most one DV exceeds 2. PCI = 100 - max CDV.
inline PciResult compute_pci(const DeductCurveSet& curves,
                             const std::vector<DistressRecord>& records) {
    if (curves.deduct.empty() || curves.correction.empty())
        raise(Errc::EmptyCurveSet, "curve set has no deduct or correction curves");

    PciResult res;
    if (records.empty()) return res;

    std::vector<double> dvs;
    dvs.reserve(records.size());
    for (const auto& r : records) dvs.push_back(lookup_deduct(curves, r));

    const double hdv = *std::max_element(dvs.begin(), dvs.end());
    res.deduct_values = cap_deduct_values(dvs, max_allowable_deducts(hdv));

    std::vector<double> work = res.deduct_values;
    while (true) {
        int q = 0;
        double tdv = 0.0;
        for (double v : work) {
            if (v > 2.0) ++q;
            tdv += v;
        }
        const int q_eff = std::max(q, 1);
        const double cdv = corrected_deduct(curves, q_eff, tdv);
        res.iterations.push_back({q_eff, tdv, cdv});
        res.max_cdv = std::max(res.max_cdv, cdv);
        if (q <= 1) break;
        // reduce the smallest DV larger than 2 down to 2 (first among ties)
        std::size_t target = work.size();
        for (std::size_t i = 0; i < work.size(); ++i)
            if (work[i] > 2.0 && (target == work.size() || work[i] < work[target])) target = i;
        work[target] = 2.0;
    }
    res.pci = clamp(100.0 - res.max_cdv, 0.0, 100.0);
    res.rating = rate_condition(res.pci);
    return res;
}

// Groups survey rows by segment (first-seen order preserved) and computes PCI
// per segment.
inline std::vector<std::pair<std::string, PciResult>> compute_pci_by_segment(
    const DeductCurveSet& curves, const std::vector<SurveyRow>& rows) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<DistressRecord>> grouped;
    for (const auto& row : rows) {
        if (!grouped.count(row.segment_id)) order.push_back(row.segment_id);
        grouped[row.segment_id].push_back(row.record);
    }
    std::vector<std::pair<std::string, PciResult>> out;
    out.reserve(order.size());
    for (const auto& id : order) out.emplace_back(id, compute_pci(curves, grouped[id]));
    return out;
}

}  // namespace roadinspect
