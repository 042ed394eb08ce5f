#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace roadinspect {

// Error codes cover every failure mode the library reports. Exceptions carry
// one of these so callers (and tests) can dispatch without string matching.
enum class Errc {
    UnknownDistress,
    InvalidDensity,
    InvalidDeduct,
    MissingCorrectionCurve,
    EmptyCurveSet,
    OutOfRange,
    NegativeDamage,
    ZeroCenterDeflection,
    NegativeDeflection,
    NonPositiveIri,
    NegativeIri,
    InvalidTreatment,
    InvalidParams,
    ParseError,
    SchemaMismatch,
    InvariantViolation,
    TooFewSegments,
    DegenerateFeature,
    NonFiniteInput,
    EmptyBatch,
    SingularNormalMatrix,
    NonFiniteLoss,
    NonFiniteFitness,
    SingularSystem,
    LengthMismatch,
    RankDeficient,
    NonFinitePrediction,
    ZeroObserved,
    InsufficientSamples,
    ArtifactMismatch,
    IoError,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::UnknownDistress: return "UnknownDistress";
        case Errc::InvalidDensity: return "InvalidDensity";
        case Errc::InvalidDeduct: return "InvalidDeduct";
        case Errc::MissingCorrectionCurve: return "MissingCorrectionCurve";
        case Errc::EmptyCurveSet: return "EmptyCurveSet";
        case Errc::OutOfRange: return "OutOfRange";
        case Errc::NegativeDamage: return "NegativeDamage";
        case Errc::ZeroCenterDeflection: return "ZeroCenterDeflection";
        case Errc::NegativeDeflection: return "NegativeDeflection";
        case Errc::NonPositiveIri: return "NonPositiveIri";
        case Errc::NegativeIri: return "NegativeIri";
        case Errc::InvalidTreatment: return "InvalidTreatment";
        case Errc::InvalidParams: return "InvalidParams";
        case Errc::ParseError: return "ParseError";
        case Errc::SchemaMismatch: return "SchemaMismatch";
        case Errc::InvariantViolation: return "InvariantViolation";
        case Errc::TooFewSegments: return "TooFewSegments";
        case Errc::DegenerateFeature: return "DegenerateFeature";
        case Errc::NonFiniteInput: return "NonFiniteInput";
        case Errc::EmptyBatch: return "EmptyBatch";
        case Errc::SingularNormalMatrix: return "SingularNormalMatrix";
        case Errc::NonFiniteLoss: return "NonFiniteLoss";
        case Errc::NonFiniteFitness: return "NonFiniteFitness";
        case Errc::SingularSystem: return "SingularSystem";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::RankDeficient: return "RankDeficient";
        case Errc::NonFinitePrediction: return "NonFinitePrediction";
        case Errc::ZeroObserved: return "ZeroObserved";
        case Errc::InsufficientSamples: return "InsufficientSamples";
        case Errc::ArtifactMismatch: return "ArtifactMismatch";
        case Errc::IoError: return "IoError";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + (msg.empty() ? "" : ": " + msg)),
          code_(code),
          message_(msg) {}
    Errc code() const noexcept { return code_; }
    const std::string& message() const noexcept { return message_; }

private:
    Errc code_;
    std::string message_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg = "") { throw Error(code, msg); }

inline void require(bool cond, Errc code, const std::string& msg = "") {
    if (!cond) raise(code, msg);
}

// Deterministic RNG. mt19937_64's raw output stream is pinned by the standard;
// the mappings below avoid std::*_distribution, whose sequences are
// implementation-defined and would break bit-reproducible artifacts.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller, second value cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Unbiased-enough bounded integer (Lemire multiply-shift).
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(eng_()) * n) >> 64);
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Per-stage seeds derived from one base seed, so a single --seed drives the
// whole pipeline reproducibly.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
    std::uint64_t x = base + 0x9E3779B97F4A7C15ull * (fnv1a64(tag) | 1ull);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

// Shortest round-trip decimal form (std::to_chars); canonical for all CSV output.
inline std::string format_double(double v) {
    std::array<char, 32> buf;
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline double clamp(double v, double lo, double hi) {
    return v < lo ? lo : (v > hi ? hi : v);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace roadinspect
