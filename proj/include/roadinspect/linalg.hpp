#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "roadinspect/common.hpp"

namespace roadinspect {

// Dense row-major matrix, just enough for the solvers here.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    std::span<double> row(std::size_t i) { return {a.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {a.data() + i * cols, cols}; }
};

inline std::vector<double> mat_vec(const Matrix& m, std::span<const double> v) {
    std::vector<double> out(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) out[i] = dot(m.row(i), v);
    return out;
}

// A^T A, filling both triangles.
inline Matrix normal_matrix(const Matrix& j) {
    Matrix g(j.cols, j.cols);
    for (std::size_t r = 0; r < j.rows; ++r) {
        auto row = j.row(r);
        for (std::size_t p = 0; p < j.cols; ++p) {
            if (row[p] == 0.0) continue;
            double v = row[p];
            for (std::size_t q = p; q < j.cols; ++q) g(p, q) += v * row[q];
        }
    }
    for (std::size_t p = 0; p < j.cols; ++p)
        for (std::size_t q = 0; q < p; ++q) g(p, q) = g(q, p);
    return g;
}

inline std::vector<double> matT_vec(const Matrix& m, std::span<const double> v) {
    std::vector<double> out(m.cols, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        auto row = m.row(i);
        for (std::size_t j = 0; j < m.cols; ++j) out[j] += row[j] * v[i];
    }
    return out;
}

// Cholesky solve of an SPD system; A and b are consumed. Returns false on a
// non-positive or non-finite pivot instead of throwing, so callers can retry
// with more damping.
inline bool cholesky_solve(Matrix a, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = a.rows;
    if (n != a.cols || b.size() != n) raise(Errc::LengthMismatch, "cholesky_solve shape");
    for (std::size_t k = 0; k < n; ++k) {
        double d = a(k, k);
        for (std::size_t j = 0; j < k; ++j) d -= a(k, j) * a(k, j);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        d = std::sqrt(d);
        a(k, k) = d;
        for (std::size_t i = k + 1; i < n; ++i) {
            double s = a(i, k);
            for (std::size_t j = 0; j < k; ++j) s -= a(i, j) * a(k, j);
            a(i, k) = s / d;
        }
    }
    // forward then backward substitution
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t j = 0; j < i; ++j) s -= a(i, j) * b[j];
        b[i] = s / a(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(j, i) * b[j];
        b[i] = s / a(i, i);
    }
    x = std::move(b);
    return true;
}

struct LsqResult {
    std::vector<double> x;
    std::size_t rank = 0;
};

// Least squares min ||Ax - b|| via Householder QR with column pivoting.
// Rank-deficient systems get the basic solution (free variables zeroed).
// A and b are consumed.
inline LsqResult lsq_qrcp(Matrix a, std::vector<double> b, double rcond = -1.0) {
    const std::size_t m = a.rows, n = a.cols;
    if (b.size() != m) raise(Errc::LengthMismatch, "lsq_qrcp shape");
    std::vector<std::size_t> perm(n);
    for (std::size_t j = 0; j < n; ++j) perm[j] = j;

    auto tail_norm2 = [&](std::size_t col, std::size_t from) {
        double s = 0.0;
        for (std::size_t i = from; i < m; ++i) s += a(i, col) * a(i, col);
        return s;
    };

    const std::size_t kmax = std::min(m, n);
    std::vector<double> diag(kmax, 0.0);
    for (std::size_t k = 0; k < kmax; ++k) {
        // pivot: column with largest remaining norm
        std::size_t best = k;
        double best_norm = tail_norm2(k, k);
        for (std::size_t j = k + 1; j < n; ++j) {
            double nj = tail_norm2(j, k);
            if (nj > best_norm) {
                best_norm = nj;
                best = j;
            }
        }
        if (best != k) {
            for (std::size_t i = 0; i < m; ++i) std::swap(a(i, k), a(i, best));
            std::swap(perm[k], perm[best]);
        }
        // Householder vector for column k
        double alpha = std::sqrt(best_norm);
        if (alpha == 0.0) {
            diag[k] = 0.0;
            continue;
        }
        if (a(k, k) > 0) alpha = -alpha;
        double v0 = a(k, k) - alpha;
        std::vector<double> v(m - k);
        v[0] = v0;
        for (std::size_t i = k + 1; i < m; ++i) v[i - k] = a(i, k);
        double vtv = 0.0;
        for (double t : v) vtv += t * t;
        a(k, k) = alpha;
        diag[k] = alpha;
        for (std::size_t i = k + 1; i < m; ++i) a(i, k) = 0.0;
        if (vtv > 0.0) {
            for (std::size_t j = k + 1; j < n; ++j) {
                double w = 0.0;
                for (std::size_t i = k; i < m; ++i)
                    w += (i == k ? v[0] : v[i - k]) * a(i, j);
                w *= 2.0 / vtv;
                for (std::size_t i = k; i < m; ++i) a(i, j) -= w * v[i - k];
            }
            double w = 0.0;
            for (std::size_t i = k; i < m; ++i) w += v[i - k] * b[i];
            w *= 2.0 / vtv;
            for (std::size_t i = k; i < m; ++i) b[i] -= w * v[i - k];
        }
    }

    double tol = rcond;
    if (tol < 0.0) tol = static_cast<double>(std::max(m, n)) * 2.220446049250313e-16;
    double dmax = 0.0;
    for (double d : diag) dmax = std::max(dmax, std::abs(d));
    std::size_t rank = 0;
    for (std::size_t k = 0; k < kmax; ++k)
        if (std::abs(diag[k]) > tol * dmax) ++rank;
        else break;

    std::vector<double> y(n, 0.0);
    for (std::size_t i = rank; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < rank; ++j) s -= a(i, j) * y[j];
        y[i] = s / a(i, i);
    }
    LsqResult res;
    res.rank = rank;
    res.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) res.x[perm[j]] = y[j];
    return res;
}

}  // namespace roadinspect
