#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "roadinspect/common.hpp"

namespace roadinspect {

inline constexpr std::size_t kNumGeophones = 7;
inline constexpr const char* kDatasetHeader = "segment_id,d1,d2,d3,d4,d5,d6,d7,pci";

// One pavement segment: the seven-sensor deflection basin (microns, D1 at the
// load plate, D7 furthest out) and the surveyed PCI.
struct Segment {
    std::string id;
    std::array<double, kNumGeophones> deflections{};
    double pci = 0.0;
};

// Defaults were tuned so that, with basins built as a decaying gap chain, the
// sample correlation of PCI against D1..D3 is negative, against D4..D7
// positive, and |corr(PCI, D7)| is the largest of the seven.
struct SynthParams {
    double d7_min = 20.0;
    double d7_range = 160.0;
    // gap_min[i]/gap_range[i] parameterize the positive gap between
    // deflection i and i+1 (0-based: index 0 is D1-D2, index 5 is D6-D7).
    std::array<double, 6> gap_min{20.0, 20.0, 15.0, 20.0, 20.0, 20.0};
    std::array<double, 6> gap_range{40.0, 40.0, 160.0, 70.0, 70.0, 70.0};
    std::array<double, 7> coef{-0.053579, -0.053579, -0.053579,
                               0.013068,  0.013068,  0.013068, 0.261361};
    double intercept = 89.9031;
    double noise_sd = 3.5;

    void validate() const {
        require(d7_range > 0.0 && d7_min >= 0.0, Errc::InvalidParams, "d7 bounds");
        for (std::size_t i = 0; i < 6; ++i)
            require(gap_min[i] >= 0.0 && gap_range[i] >= 0.0, Errc::InvalidParams, "gap bounds");
        require(noise_sd >= 0.0, Errc::InvalidParams, "noise_sd");
        for (double c : coef) require(std::isfinite(c), Errc::InvalidParams, "coef");
    }
};

struct Provenance {
    enum class Kind { Real, Synthetic };
    Kind kind = Kind::Real;
    std::uint64_t seed = 0;
    SynthParams params;
};

struct Dataset {
    std::vector<Segment> segments;
    Provenance provenance;

    std::size_t size() const { return segments.size(); }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s, std::size_t line_no, const std::string& field) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    double v = 0.0;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        raise(Errc::ParseError,
              "line " + std::to_string(line_no) + ", field " + field + ": '" + s + "'");
    return v;
}

}  // namespace detail

inline void validate_segment(const Segment& s, std::size_t line_no) {
    for (std::size_t k = 0; k < kNumGeophones; ++k)
        if (!(s.deflections[k] >= 0.0) || !std::isfinite(s.deflections[k]))
            raise(Errc::InvariantViolation,
                  "line " + std::to_string(line_no) + ", field d" + std::to_string(k + 1) +
                      ": deflection must be >= 0");
    if (!(s.pci >= 0.0 && s.pci <= 100.0))
        raise(Errc::InvariantViolation,
              "line " + std::to_string(line_no) + ", field pci: must be in [0, 100]");
}

inline Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::IoError, "cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) raise(Errc::SchemaMismatch, "empty file " + path);
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line != kDatasetHeader)
        raise(Errc::SchemaMismatch, "expected header '" + std::string(kDatasetHeader) + "'");

    Dataset ds;
    std::vector<std::string> seen_ids;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 9)
            raise(Errc::SchemaMismatch,
                  "line " + std::to_string(line_no) + ": expected 9 columns, got " +
                      std::to_string(fields.size()));
        Segment s;
        s.id = fields[0];
        if (s.id.empty())
            raise(Errc::InvariantViolation,
                  "line " + std::to_string(line_no) + ", field segment_id: empty");
        for (std::size_t k = 0; k < kNumGeophones; ++k)
            s.deflections[k] =
                detail::parse_double(fields[k + 1], line_no, "d" + std::to_string(k + 1));
        s.pci = detail::parse_double(fields[8], line_no, "pci");
        validate_segment(s, line_no);
        ds.segments.push_back(std::move(s));
    }
    // unique ids
    std::vector<std::string> ids;
    ids.reserve(ds.segments.size());
    for (const auto& s : ds.segments) ids.push_back(s.id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        raise(Errc::InvariantViolation, "duplicate segment_id in " + path);
    return ds;
}

inline void write_csv(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) raise(Errc::IoError, "cannot write " + path);
    out << kDatasetHeader << "\n";
    for (const auto& s : ds.segments) {
        out << s.id;
        for (double d : s.deflections) out << ',' << format_double(d);
        out << ',' << format_double(s.pci) << "\n";
    }
}

// Seeded shuffle picks test membership; both parts keep original row order.
inline std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction,
                                         std::uint64_t seed) {
    require(test_fraction > 0.0 && test_fraction < 1.0, Errc::InvalidParams,
            "test_fraction must be in (0, 1)");
    const std::size_t n = data.size();
    if (n < 2) raise(Errc::TooFewSegments, "need at least 2 segments to split");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        std::size_t j = rng.below(i + 1);
        std::swap(idx[i], idx[j]);
    }
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(n)));
    std::vector<bool> is_test(n, false);
    for (std::size_t i = 0; i < n_test; ++i) is_test[idx[i]] = true;

    Dataset train, test;
    train.provenance = data.provenance;
    test.provenance = data.provenance;
    for (std::size_t i = 0; i < n; ++i)
        (is_test[i] ? test : train).segments.push_back(data.segments[i]);
    return {std::move(train), std::move(test)};
}

// Min-max mapping of the 7 inputs and the PCI target onto [-1, 1], fitted on
// the training split only.
struct Scaler {
    std::array<double, kNumGeophones> in_min{}, in_max{};
    double target_min = 0.0, target_max = 0.0;

    std::array<double, kNumGeophones> transform(
        const std::array<double, kNumGeophones>& x) const {
        std::array<double, kNumGeophones> out{};
        for (std::size_t k = 0; k < kNumGeophones; ++k)
            out[k] = -1.0 + 2.0 * (x[k] - in_min[k]) / (in_max[k] - in_min[k]);
        return out;
    }

    std::array<double, kNumGeophones> inverse(
        const std::array<double, kNumGeophones>& z) const {
        std::array<double, kNumGeophones> out{};
        for (std::size_t k = 0; k < kNumGeophones; ++k)
            out[k] = in_min[k] + (z[k] + 1.0) * 0.5 * (in_max[k] - in_min[k]);
        return out;
    }

    double scale_target(double pci) const {
        return -1.0 + 2.0 * (pci - target_min) / (target_max - target_min);
    }

    double unscale_target(double z) const {
        return target_min + (z + 1.0) * 0.5 * (target_max - target_min);
    }
};

inline Scaler fit_scaler(const Dataset& train) {
    require(!train.segments.empty(), Errc::InvalidParams, "empty training set");
    Scaler sc;
    sc.in_min.fill(std::numeric_limits<double>::infinity());
    sc.in_max.fill(-std::numeric_limits<double>::infinity());
    sc.target_min = std::numeric_limits<double>::infinity();
    sc.target_max = -std::numeric_limits<double>::infinity();
    for (const auto& s : train.segments) {
        for (std::size_t k = 0; k < kNumGeophones; ++k) {
            sc.in_min[k] = std::min(sc.in_min[k], s.deflections[k]);
            sc.in_max[k] = std::max(sc.in_max[k], s.deflections[k]);
        }
        sc.target_min = std::min(sc.target_min, s.pci);
        sc.target_max = std::max(sc.target_max, s.pci);
    }
    for (std::size_t k = 0; k < kNumGeophones; ++k)
        if (!(sc.in_max[k] > sc.in_min[k]))
            raise(Errc::DegenerateFeature, "d" + std::to_string(k + 1) + " is constant");
    if (!(sc.target_max > sc.target_min)) raise(Errc::DegenerateFeature, "pci is constant");
    return sc;
}

// Scaled view of a dataset as plain rows, the form the trainers consume.
struct TrainSet {
    std::vector<std::vector<double>> x;
    std::vector<double> y;

    std::size_t size() const { return x.size(); }
};

inline TrainSet scale_dataset(const Dataset& ds, const Scaler& sc) {
    TrainSet ts;
    ts.x.reserve(ds.size());
    ts.y.reserve(ds.size());
    for (const auto& s : ds.segments) {
        auto z = sc.transform(s.deflections);
        ts.x.emplace_back(z.begin(), z.end());
        ts.y.push_back(sc.scale_target(s.pci));
    }
    return ts;
}

// Draws basins as a strictly decaying gap chain from D7 upward, then plants
// PCI = clamp(intercept + coef . D, 0, 100) + Gaussian noise, re-clamped so
// the segment invariant holds.
inline Dataset synth_generate(std::size_t n, std::uint64_t seed, const SynthParams& params = {}) {
    require(n >= 1, Errc::InvalidParams, "n must be >= 1");
    params.validate();
    Dataset ds;
    ds.provenance.kind = Provenance::Kind::Synthetic;
    ds.provenance.seed = seed;
    ds.provenance.params = params;
    Rng rng(seed);
    ds.segments.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Segment s;
        std::array<double, kNumGeophones>& d = s.deflections;
        d[6] = params.d7_min + params.d7_range * rng.uniform01();
        for (std::size_t k = 6; k-- > 0;)
            d[k] = d[k + 1] + params.gap_min[k] + params.gap_range[k] * rng.uniform01();
        double g = params.intercept;
        for (std::size_t k = 0; k < kNumGeophones; ++k) g += params.coef[k] * d[k];
        double pci = clamp(g, 0.0, 100.0);
        if (params.noise_sd > 0.0) pci += params.noise_sd * rng.gaussian();
        s.pci = clamp(pci, 0.0, 100.0);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "synth-%06zu", i + 1);
        s.id = buf;
        ds.segments.push_back(std::move(s));
    }
    return ds;
}

}  // namespace roadinspect
