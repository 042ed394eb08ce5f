#pragma once

#include <cmath>

#include "roadinspect/common.hpp"

namespace roadinspect {

// Baselines that can leave the PCI scale report both the raw formula value
// and a [0, 100] clamp.
struct RawClamped {
    double raw = 0.0;
    double clamped = 0.0;
};

inline RawClamped make_raw_clamped(double raw) { return {raw, clamp(raw, 0.0, 100.0)}; }

// Normalized deflection basin slope (d0 - d12)/d0; dimensionless.
inline double basin_diff(double d0, double d12) {
    if (d0 == 0.0) raise(Errc::ZeroCenterDeflection, "d0 = 0");
    require(std::isfinite(d0) && std::isfinite(d12), Errc::NonFiniteInput, "basin_diff");
    return (d0 - d12) / d0;
}

// Deflection basin area 12*(d0 + d12), in^2/10^3.
inline double basin_area(double d0, double d12) {
    if (d0 < 0.0 || d12 < 0.0) raise(Errc::NegativeDeflection, "basin_area");
    require(std::isfinite(d0) && std::isfinite(d12), Errc::NonFiniteInput, "basin_area");
    return 12.0 * (d0 + d12);
}

struct ObrienInputs {
    double age = 0.0;             // years since last overlay
    double age_to_overlay = 0.0;  // years to last overlay
    double age_total = 0.0;       // total pavement age, years
    double log_traffic = 0.0;     // log of weighted traffic total, veh/day
    double d0 = 0.0;              // deflection at load-plate center, mils
    double d12 = 0.0;             // deflection 12 in from center, mils

    void validate() const {
        require(age >= 0.0 && age_to_overlay >= 0.0 && age_total >= 0.0, Errc::InvalidParams,
                "ages must be >= 0");
        require(age_total >= age_to_overlay, Errc::InvalidParams,
                "age_total must be >= age_to_overlay");
    }
};

// Deflection-based predictor; three subtracted terms, each carrying a
// positive power of AGE and a power of DIFF.
inline RawClamped obrien_pci(const ObrienInputs& in) {
    in.validate();
    const double diff = basin_diff(in.d0, in.d12);
    const double area = basin_area(in.d0, in.d12);
    const double t1 = 0.000572 * in.age * in.age * in.log_traffic * diff * area;
    const double t2 = 0.3062 * std::pow(in.age, 0.25) * in.age_to_overlay * in.age_to_overlay *
                      diff * diff;
    const double t3 =
        0.00156 * std::sqrt(in.age) * in.age_total * in.log_traffic * diff * area;
    return make_raw_clamped(96.6 - (t1 + t2 + t3));
}

// log10(PCI) = 2 - 0.436 log10(IRI).
inline double park_pci(double iri) {
    if (!(iri > 0.0)) raise(Errc::NonPositiveIri, "iri must be > 0");
    return std::pow(10.0, 2.0 - 0.436 * std::log10(iri));
}

// PCI = 153 - IRI/0.0171.
inline RawClamped dewan_smith_pci(double iri) {
    if (iri < 0.0) raise(Errc::NegativeIri, "iri must be >= 0");
    return make_raw_clamped(153.0 - iri / 0.0171);
}

// a + b*age^c performance curve.
inline double age_curve_pci(double age, double a, double b, double c) {
    require(age >= 0.0, Errc::InvalidParams, "age must be >= 0");
    return a + b * std::pow(age, c);
}

// 71.09 + 27.42*treatment - 4.07*age; treatment 0 = microsurfacing, 1 = thin overlay.
inline double michles_pci(int treatment, double age) {
    if (treatment != 0 && treatment != 1) raise(Errc::InvalidTreatment, "treatment must be 0 or 1");
    require(age >= 0.0, Errc::InvalidParams, "age must be >= 0");
    return 71.09 + 27.42 * static_cast<double>(treatment) - 4.07 * age;
}

}  // namespace roadinspect
