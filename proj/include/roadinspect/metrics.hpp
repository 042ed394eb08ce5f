#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "roadinspect/common.hpp"
#include "roadinspect/dataset.hpp"

namespace roadinspect {

namespace detail {

inline void check_pair(std::span<const double> obs, std::span<const double> pred) {
    if (obs.size() != pred.size())
        raise(Errc::LengthMismatch, std::to_string(obs.size()) + " vs " +
                                        std::to_string(pred.size()));
    if (obs.empty()) raise(Errc::EmptyBatch, "no samples");
}

inline void check_nonzero_observed(std::span<const double> obs) {
    for (std::size_t i = 0; i < obs.size(); ++i)
        if (obs[i] == 0.0)
            raise(Errc::ZeroObserved, "observed[" + std::to_string(i) + "] = 0");
}

}  // namespace detail

// Average percent relative error; signed, so over- and under-prediction cancel.
inline double apre(std::span<const double> obs, std::span<const double> pred) {
    detail::check_pair(obs, pred);
    detail::check_nonzero_observed(obs);
    double s = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) s += (obs[i] - pred[i]) / obs[i];
    return 100.0 * s / static_cast<double>(obs.size());
}

inline double aapre(std::span<const double> obs, std::span<const double> pred) {
    detail::check_pair(obs, pred);
    detail::check_nonzero_observed(obs);
    double s = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) s += std::abs((obs[i] - pred[i]) / obs[i]);
    return 100.0 * s / static_cast<double>(obs.size());
}

inline double rmse(std::span<const double> obs, std::span<const double> pred) {
    detail::check_pair(obs, pred);
    double s = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        double e = obs[i] - pred[i];
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(obs.size()));
}

// Standard error of the relative residuals; the N-1 denominator makes N = 1 invalid.
inline double sd(std::span<const double> obs, std::span<const double> pred) {
    detail::check_pair(obs, pred);
    if (obs.size() < 2) raise(Errc::InsufficientSamples, "sd needs N >= 2");
    detail::check_nonzero_observed(obs);
    double s = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        double e = (obs[i] - pred[i]) / obs[i];
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(obs.size() - 1));
}

inline double pearson(std::span<const double> xs, std::span<const double> ys) {
    detail::check_pair(xs, ys);
    const auto n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) raise(Errc::DegenerateFeature, "constant series");
    return sxy / std::sqrt(sxx * syy);
}

// Signed relevancy factor of each geophone against PCI.
inline std::array<double, kNumGeophones> input_impact(const Dataset& data) {
    if (data.size() < 3) raise(Errc::InsufficientSamples, "input_impact needs N >= 3");
    std::vector<double> pci;
    pci.reserve(data.size());
    for (const auto& s : data.segments) pci.push_back(s.pci);
    std::array<double, kNumGeophones> out{};
    std::vector<double> col(data.size());
    for (std::size_t k = 0; k < kNumGeophones; ++k) {
        for (std::size_t i = 0; i < data.size(); ++i) col[i] = data.segments[i].deflections[k];
        out[k] = pearson(col, pci);
    }
    return out;
}

struct SplitMetrics {
    std::string model;
    std::string split;  // Train | Test | Total
    std::size_t n = 0;
    double apre_pct = 0.0;
    double aapre_pct = 0.0;
    double rmse = 0.0;
    double sd = 0.0;
};

inline SplitMetrics compute_split_metrics(const std::string& model, const std::string& split,
                                          std::span<const double> obs,
                                          std::span<const double> pred) {
    SplitMetrics m;
    m.model = model;
    m.split = split;
    m.n = obs.size();
    m.apre_pct = apre(obs, pred);
    m.aapre_pct = aapre(obs, pred);
    m.rmse = roadinspect::rmse(obs, pred);
    m.sd = roadinspect::sd(obs, pred);
    return m;
}

inline void write_metrics_csv(const std::string& path, const std::vector<SplitMetrics>& rows) {
    std::ofstream out(path);
    if (!out) raise(Errc::IoError, "cannot write " + path);
    out << "model,split,n,apre_pct,aapre_pct,rmse,sd\n";
    for (const auto& r : rows)
        out << r.model << ',' << r.split << ',' << r.n << ',' << format_double(r.apre_pct)
            << ',' << format_double(r.aapre_pct) << ',' << format_double(r.rmse) << ','
            << format_double(r.sd) << "\n";
}

inline void write_crossplot_csv(const std::string& path, std::span<const double> obs,
                                std::span<const double> pred) {
    detail::check_pair(obs, pred);
    std::ofstream out(path);
    if (!out) raise(Errc::IoError, "cannot write " + path);
    out << "observed,predicted\n";
    for (std::size_t i = 0; i < obs.size(); ++i)
        out << format_double(obs[i]) << ',' << format_double(pred[i]) << "\n";
}

inline void write_relerr_csv(const std::string& path, std::span<const double> obs,
                             std::span<const double> pred) {
    detail::check_pair(obs, pred);
    detail::check_nonzero_observed(obs);
    std::ofstream out(path);
    if (!out) raise(Errc::IoError, "cannot write " + path);
    out << "observed,rel_error_pct\n";
    for (std::size_t i = 0; i < obs.size(); ++i)
        out << format_double(obs[i]) << ','
            << format_double(100.0 * (obs[i] - pred[i]) / obs[i]) << "\n";
}

// Sorted absolute relative errors with empirical cumulative frequency.
inline void write_cumfreq_csv(const std::string& path, std::span<const double> obs,
                              std::span<const double> pred) {
    detail::check_pair(obs, pred);
    detail::check_nonzero_observed(obs);
    std::vector<double> abs_err;
    abs_err.reserve(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i)
        abs_err.push_back(std::abs(100.0 * (obs[i] - pred[i]) / obs[i]));
    std::sort(abs_err.begin(), abs_err.end());
    std::ofstream out(path);
    if (!out) raise(Errc::IoError, "cannot write " + path);
    out << "abs_rel_error_pct,cum_freq\n";
    const auto n = static_cast<double>(abs_err.size());
    for (std::size_t i = 0; i < abs_err.size(); ++i)
        out << format_double(abs_err[i]) << ','
            << format_double(static_cast<double>(i + 1) / n) << "\n";
}

}  // namespace roadinspect
