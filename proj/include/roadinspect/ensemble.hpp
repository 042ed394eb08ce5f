#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "roadinspect/common.hpp"
#include "roadinspect/linalg.hpp"

namespace roadinspect {

inline constexpr std::size_t kCmisInputs = 4;  // MLP-LM, MLP-SCG, RBF-GA, RBF-ICA

// Committee model: intercept plus one coefficient per component model, applied
// exactly as stored (no renormalization).
struct CmisModel {
    std::array<double, kCmisInputs + 1> coefficients{};  // [intercept, c2..c5]
    std::string fitted_on;

    // Published reference coefficients; the slopes sum to 1.001187.
    static CmisModel reference() {
        CmisModel m;
        m.coefficients = {0.0, 0.657295, 0.227583, 0.069749, 0.04656};
        m.fitted_on = "published";
        return m;
    }
};

inline double combine(const CmisModel& m, const std::array<double, kCmisInputs>& preds) {
    for (double p : preds)
        if (!std::isfinite(p)) raise(Errc::NonFinitePrediction, "combine");
    double s = m.coefficients[0];
    for (std::size_t i = 0; i < kCmisInputs; ++i) s += m.coefficients[i + 1] * preds[i];
    return s;
}

enum class CmisConstraint { None, NonNegative };

struct CmisFit {
    CmisModel model;
    double train_rmse = 0.0;
};

namespace detail {

inline double cmis_rmse(const Matrix& preds, std::span<const double> targets,
                        const std::array<double, kCmisInputs + 1>& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < preds.rows; ++i) {
        double p = c[0];
        for (std::size_t j = 0; j < kCmisInputs; ++j) p += c[j + 1] * preds(i, j);
        const double e = targets[i] - p;
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(preds.rows));
}

}  // namespace detail

// Least-squares committee weights over an N x 4 prediction matrix.
// Unconstrained mode is plain OLS with intercept; the non-negative mode runs
// projected coordinate descent with the slopes clamped at zero.
inline CmisFit fit_weights(const Matrix& preds, std::span<const double> targets,
                           CmisConstraint constraint = CmisConstraint::None) {
    require(preds.cols == kCmisInputs, Errc::LengthMismatch, "need 4 prediction columns");
    require(preds.rows == targets.size(), Errc::LengthMismatch, "rows vs targets");
    require(preds.rows >= kCmisInputs + 1, Errc::InvalidParams, "need N >= 5");
    require(all_finite({preds.a.data(), preds.a.size()}), Errc::NonFinitePrediction,
            "fit_weights");

    CmisFit fit;
    if (constraint == CmisConstraint::None) {
        Matrix design(preds.rows, kCmisInputs + 1);
        std::vector<double> b(targets.begin(), targets.end());
        for (std::size_t i = 0; i < preds.rows; ++i) {
            design(i, 0) = 1.0;
            for (std::size_t j = 0; j < kCmisInputs; ++j) design(i, j + 1) = preds(i, j);
        }
        auto res = lsq_qrcp(std::move(design), std::move(b));
        if (res.rank < kCmisInputs + 1)
            raise(Errc::RankDeficient, "prediction columns are collinear (rank " +
                                           std::to_string(res.rank) + ")");
        std::copy(res.x.begin(), res.x.end(), fit.model.coefficients.begin());
    } else {
        // coordinate descent on [intercept, slopes >= 0]
        std::array<double, kCmisInputs + 1> c{};
        std::vector<double> resid(targets.begin(), targets.end());  // targets - prediction
        auto column_dot = [&](std::size_t j) {  // <resid, col_j>, col 0 is all-ones
            double s = 0.0;
            for (std::size_t i = 0; i < preds.rows; ++i)
                s += resid[i] * (j == 0 ? 1.0 : preds(i, j - 1));
            return s;
        };
        std::array<double, kCmisInputs + 1> col_norm2{};
        col_norm2[0] = static_cast<double>(preds.rows);
        for (std::size_t j = 1; j <= kCmisInputs; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < preds.rows; ++i) s += preds(i, j - 1) * preds(i, j - 1);
            col_norm2[j] = s;
        }
        for (std::size_t sweep = 0; sweep < 10000; ++sweep) {
            double max_change = 0.0;
            for (std::size_t j = 0; j <= kCmisInputs; ++j) {
                if (col_norm2[j] == 0.0) continue;
                double step = column_dot(j) / col_norm2[j];
                double next = c[j] + step;
                if (j > 0 && next < 0.0) next = 0.0;
                const double change = next - c[j];
                if (change != 0.0) {
                    for (std::size_t i = 0; i < preds.rows; ++i)
                        resid[i] -= change * (j == 0 ? 1.0 : preds(i, j - 1));
                    c[j] = next;
                }
                max_change = std::max(max_change, std::abs(change));
            }
            if (max_change < 1e-14) break;
        }
        fit.model.coefficients = c;
    }
    fit.train_rmse = detail::cmis_rmse(preds, targets, fit.model.coefficients);
    return fit;
}

}  // namespace roadinspect
