#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "roadinspect/common.hpp"
#include "roadinspect/dataset.hpp"
#include "roadinspect/linalg.hpp"
#include "roadinspect/metaheuristics.hpp"

namespace roadinspect {

// Gaussian RBF network: N centers, one shared spread, linear output layer.
struct RbfModel {
    Matrix centers;  // N x input_dim
    double spread = 0.37;
    std::vector<double> weights;  // N
    double bias = 0.0;
    Scaler scaler;

    void validate() const {
        require(centers.rows >= 1, Errc::InvalidParams, "need at least one center");
        require(spread > 0.0, Errc::InvalidParams, "spread must be > 0");
        require(weights.size() == centers.rows, Errc::LengthMismatch, "weights vs centers");
    }
};

inline double rbf_kernel(double dist, double spread) {
    const double t = dist / spread;
    return std::exp(-t * t);
}

// sum_j w_j * exp(-(||x - c_j||/sigma)^2) + bias
inline double rbf_forward(const RbfModel& m, std::span<const double> input) {
    if (input.size() != m.centers.cols) raise(Errc::LengthMismatch, "input width");
    if (!all_finite(input)) raise(Errc::NonFiniteInput, "rbf_forward");
    double s = m.bias;
    for (std::size_t j = 0; j < m.centers.rows; ++j) {
        double d2 = 0.0;
        auto c = m.centers.row(j);
        for (std::size_t k = 0; k < input.size(); ++k) {
            const double d = input[k] - c[k];
            d2 += d * d;
        }
        s += m.weights[j] * rbf_kernel(std::sqrt(d2), m.spread);
    }
    return s;
}

// Design matrix [Phi | 1] over the sample rows.
inline Matrix rbf_design_matrix(const Matrix& centers, double spread,
                                const std::vector<std::vector<double>>& xs) {
    Matrix d(xs.size(), centers.rows + 1);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < centers.rows; ++j) {
            double d2 = 0.0;
            auto c = centers.row(j);
            for (std::size_t k = 0; k < xs[i].size(); ++k) {
                const double t = xs[i][k] - c[k];
                d2 += t * t;
            }
            d(i, j) = rbf_kernel(std::sqrt(d2), spread);
        }
        d(i, centers.rows) = 1.0;
    }
    return d;
}

struct RbfWeights {
    std::vector<double> weights;
    double bias = 0.0;
};

// Ridge least squares over [Phi | 1]; only the kernel weights are penalized,
// the bias stays free. With ridge = 0 a rank-deficient Phi raises
// SingularSystem; the benign deficiency from appending the bias column to a
// full-rank Phi resolves to the basic least-squares solution instead.
inline RbfWeights solve_output_weights(const Matrix& centers, double spread,
                                       const TrainSet& train, double ridge) {
    require(train.size() >= 1, Errc::EmptyBatch, "solve_output_weights");
    require(ridge >= 0.0, Errc::InvalidParams, "ridge must be >= 0");
    const std::size_t n = train.size(), nc = centers.rows;
    Matrix top = rbf_design_matrix(centers, spread, train.x);
    const std::size_t extra = ridge > 0.0 ? nc : 0;
    Matrix a(n + extra, nc + 1);
    std::vector<double> b(n + extra, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::copy(top.row(i).begin(), top.row(i).end(), a.row(i).begin());
        b[i] = train.y[i];
    }
    if (ridge > 0.0) {
        const double s = std::sqrt(ridge);
        for (std::size_t j = 0; j < nc; ++j) a(n + j, j) = s;
    }
    if (ridge == 0.0) {
        // the kernel block alone must have full column rank; the appended bias
        // column can hide a collapsed kernel column from the combined rank
        Matrix phi(n, nc);
        for (std::size_t i = 0; i < n; ++i)
            std::copy(top.row(i).begin(), top.row(i).end() - 1, phi.row(i).begin());
        auto probe = lsq_qrcp(std::move(phi), std::vector<double>(n, 0.0));
        if (probe.rank < std::min(n, nc))
            raise(Errc::SingularSystem,
                  "kernel matrix numerically rank " + std::to_string(probe.rank) + " < " +
                      std::to_string(std::min(n, nc)));
    }
    auto res = lsq_qrcp(std::move(a), std::move(b));
    RbfWeights w;
    w.weights.assign(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(nc));
    w.bias = res.x[nc];
    return w;
}

// Genome is centers (row-major) followed by log(spread); output weights are
// re-solved per candidate, so they stay out of the search space.
inline std::vector<double> encode_genome(const RbfModel& m) {
    std::vector<double> g(m.centers.a);
    g.push_back(std::log(m.spread));
    return g;
}

inline void decode_genome(std::span<const double> genome, std::size_t n_centers,
                          std::size_t dim, Matrix& centers, double& spread) {
    if (genome.size() != n_centers * dim + 1)
        raise(Errc::LengthMismatch, "genome length " + std::to_string(genome.size()) +
                                        " != " + std::to_string(n_centers * dim + 1));
    centers = Matrix(n_centers, dim);
    std::copy(genome.begin(), genome.end() - 1, centers.a.begin());
    spread = std::exp(genome.back());
}

enum class RbfOptimizer { Ga, Ica };

struct RbfTrainConfig {
    std::size_t n_centers = 55;
    double spread_init = 0.37;
    double ridge = 1e-8;
    RbfOptimizer optimizer = RbfOptimizer::Ga;
    GaConfig ga;
    IcaConfig ica;
    std::uint64_t seed = 0;
    // search box: centers roam slightly beyond the scaled data cube, the
    // spread is searched in log space around spread_init
    double center_lo = -1.2, center_hi = 1.2;
    double spread_span = 8.0;

    void validate() const {
        require(n_centers >= 1, Errc::InvalidParams, "n_centers");
        require(spread_init > 0.0, Errc::InvalidParams, "spread_init");
        require(ridge >= 0.0, Errc::InvalidParams, "ridge");
        require(center_lo < center_hi, Errc::InvalidParams, "center bounds");
        require(spread_span > 1.0, Errc::InvalidParams, "spread_span");
    }
};

struct RbfTrainResult {
    RbfModel model;
    OptimizationTrace trace;
};

// Hybrid training: the metaheuristic searches centers and spread, the linear
// output layer is solved exactly for every candidate. Fitness is training MSE.
inline RbfTrainResult train_rbf(const TrainSet& train, const RbfTrainConfig& config) {
    config.validate();
    require(train.size() >= 1, Errc::EmptyBatch, "train_rbf");
    const std::size_t dim = train.x.front().size();
    const std::size_t n_genes = config.n_centers * dim + 1;

    ObjectiveSpec spec;
    spec.dimension = n_genes;
    spec.lower.assign(n_genes, config.center_lo);
    spec.upper.assign(n_genes, config.center_hi);
    spec.lower[n_genes - 1] = std::log(config.spread_init / config.spread_span);
    spec.upper[n_genes - 1] = std::log(config.spread_init * config.spread_span);
    spec.fitness = [&](std::span<const double> genome) {
        Matrix centers;
        double spread = 0.0;
        decode_genome(genome, config.n_centers, dim, centers, spread);
        RbfWeights w = solve_output_weights(centers, spread, train, config.ridge);
        RbfModel cand;
        cand.centers = std::move(centers);
        cand.spread = spread;
        cand.weights = std::move(w.weights);
        cand.bias = w.bias;
        double mse = 0.0;
        for (std::size_t i = 0; i < train.size(); ++i) {
            const double r = train.y[i] - rbf_forward(cand, train.x[i]);
            mse += r * r;
        }
        return mse / static_cast<double>(train.size());
    };

    OptimizationTrace trace;
    if (config.optimizer == RbfOptimizer::Ga) {
        GaConfig ga = config.ga;
        ga.seed = config.seed;
        trace = ga_optimize(spec, ga);
    } else {
        IcaConfig ica = config.ica;
        ica.seed = config.seed;
        trace = ica_optimize(spec, ica);
    }

    RbfTrainResult out;
    Matrix centers;
    double spread = 0.0;
    decode_genome(trace.best_vector, config.n_centers, dim, centers, spread);
    RbfWeights w = solve_output_weights(centers, spread, train, config.ridge);
    out.model.centers = std::move(centers);
    out.model.spread = spread;
    out.model.weights = std::move(w.weights);
    out.model.bias = w.bias;
    out.trace = std::move(trace);
    return out;
}

inline double predict_pci(const RbfModel& m, const std::array<double, kNumGeophones>& raw) {
    auto z = m.scaler.transform(raw);
    return m.scaler.unscale_target(rbf_forward(m, std::span<const double>(z.data(), z.size())));
}

}  // namespace roadinspect
