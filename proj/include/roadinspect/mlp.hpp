#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "roadinspect/common.hpp"
#include "roadinspect/dataset.hpp"
#include "roadinspect/linalg.hpp"

namespace roadinspect {

enum class Activation { Tansig, Sigmoid, Tanh, Linear };

inline const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Tansig: return "tansig";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Tanh: return "tanh";
        case Activation::Linear: return "linear";
    }
    return "?";
}

inline Activation parse_activation(const std::string& s) {
    if (s == "tansig") return Activation::Tansig;
    if (s == "sigmoid") return Activation::Sigmoid;
    if (s == "tanh") return Activation::Tanh;
    if (s == "linear") return Activation::Linear;
    raise(Errc::ParseError, "unknown activation '" + s + "'");
}

// Tansig is the conventional name for 2/(1+e^(-2x))-1, which is tanh.
inline double activate(Activation a, double x) {
    switch (a) {
        case Activation::Tansig:
        case Activation::Tanh: return std::tanh(x);
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case Activation::Linear: return x;
    }
    return x;
}

// Derivative expressed through the activation output.
inline double activate_deriv(Activation a, double y) {
    switch (a) {
        case Activation::Tansig:
        case Activation::Tanh: return 1.0 - y * y;
        case Activation::Sigmoid: return y * (1.0 - y);
        case Activation::Linear: return 1.0;
    }
    return 1.0;
}

struct MlpArchitecture {
    std::vector<std::size_t> layer_sizes;        // input, hidden..., output
    std::vector<Activation> hidden_activations;  // one per hidden layer; output is linear

    // 7 inputs, 40 neurons in 4 hidden layers, single output.
    static MlpArchitecture default_config() {
        MlpArchitecture a;
        a.layer_sizes = {7, 10, 10, 10, 10, 1};
        a.hidden_activations = {Activation::Tansig, Activation::Sigmoid, Activation::Tansig,
                                Activation::Tansig};
        return a;
    }

    std::size_t n_layers() const { return layer_sizes.size() - 1; }  // weight layers

    void validate() const {
        require(layer_sizes.size() >= 2, Errc::InvalidParams, "need input and output layers");
        for (std::size_t s : layer_sizes)
            require(s >= 1, Errc::InvalidParams, "layer sizes must be >= 1");
        require(hidden_activations.size() == layer_sizes.size() - 2, Errc::InvalidParams,
                "one activation per hidden layer");
        require(layer_sizes.back() == 1, Errc::InvalidParams, "single output unit");
    }

    std::size_t param_count() const {
        std::size_t p = 0;
        for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
            p += layer_sizes[l + 1] * (layer_sizes[l] + 1);
        return p;
    }
};

struct MlpModel {
    MlpArchitecture arch;
    std::vector<Matrix> weights;               // weights[l]: n_{l+1} x n_l
    std::vector<std::vector<double>> biases;   // biases[l]: n_{l+1}
    Scaler scaler;

    std::size_t param_count() const { return arch.param_count(); }

    std::vector<double> flatten() const {
        std::vector<double> out;
        out.reserve(param_count());
        for (std::size_t l = 0; l < weights.size(); ++l) {
            out.insert(out.end(), weights[l].a.begin(), weights[l].a.end());
            out.insert(out.end(), biases[l].begin(), biases[l].end());
        }
        return out;
    }

    void unflatten(std::span<const double> theta) {
        if (theta.size() != param_count()) raise(Errc::LengthMismatch, "parameter vector size");
        std::size_t pos = 0;
        for (std::size_t l = 0; l < weights.size(); ++l) {
            std::copy(theta.begin() + pos, theta.begin() + pos + weights[l].a.size(),
                      weights[l].a.begin());
            pos += weights[l].a.size();
            std::copy(theta.begin() + pos, theta.begin() + pos + biases[l].size(),
                      biases[l].begin());
            pos += biases[l].size();
        }
    }

    Activation layer_activation(std::size_t l) const {
        return l + 1 < arch.n_layers() ? arch.hidden_activations[l] : Activation::Linear;
    }

    // Layer-by-layer affine map plus activation; input must already be scaled.
    double forward(std::span<const double> input) const {
        if (input.size() != arch.layer_sizes.front())
            raise(Errc::LengthMismatch, "input width");
        if (!all_finite(input)) raise(Errc::NonFiniteInput, "forward");
        std::vector<double> a(input.begin(), input.end());
        for (std::size_t l = 0; l < arch.n_layers(); ++l) {
            const Activation act = layer_activation(l);
            std::vector<double> next(arch.layer_sizes[l + 1]);
            for (std::size_t i = 0; i < next.size(); ++i)
                next[i] = activate(act, dot(weights[l].row(i), a) + biases[l][i]);
            a = std::move(next);
        }
        return a[0];
    }
};

// Glorot-uniform weights, zero biases, fully seeded.
inline MlpModel init_weights(const MlpArchitecture& arch, std::uint64_t seed) {
    arch.validate();
    MlpModel m;
    m.arch = arch;
    Rng rng(seed);
    for (std::size_t l = 0; l < arch.n_layers(); ++l) {
        const std::size_t fan_in = arch.layer_sizes[l], fan_out = arch.layer_sizes[l + 1];
        const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Matrix w(fan_out, fan_in);
        for (double& v : w.a) v = rng.uniform(-r, r);
        m.weights.push_back(std::move(w));
        m.biases.emplace_back(fan_out, 0.0);
    }
    return m;
}

namespace detail {

// Forward pass keeping every layer's outputs; a[0] is the input.
inline std::vector<std::vector<double>> forward_trace(const MlpModel& m,
                                                      std::span<const double> input) {
    std::vector<std::vector<double>> a(m.arch.n_layers() + 1);
    a[0].assign(input.begin(), input.end());
    for (std::size_t l = 0; l < m.arch.n_layers(); ++l) {
        const Activation act = m.layer_activation(l);
        a[l + 1].resize(m.arch.layer_sizes[l + 1]);
        for (std::size_t i = 0; i < a[l + 1].size(); ++i)
            a[l + 1][i] = activate(act, dot(m.weights[l].row(i), a[l]) + m.biases[l][i]);
    }
    return a;
}

// Reverse pass for one sample. `upstream` is dTarget/dOutput; the per-layer
// contributions land in `grad` (flattened layout) scaled by `upstream`.
inline void backprop_into(const MlpModel& m, const std::vector<std::vector<double>>& a,
                          double upstream, std::span<double> grad) {
    const std::size_t layers = m.arch.n_layers();
    std::vector<double> delta{upstream};  // output layer is linear
    // parameter offsets per layer
    std::vector<std::size_t> offset(layers);
    std::size_t pos = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        offset[l] = pos;
        pos += m.weights[l].a.size() + m.biases[l].size();
    }
    for (std::size_t l = layers; l-- > 0;) {
        const auto& al = a[l];
        std::size_t w_off = offset[l];
        std::size_t b_off = offset[l] + m.weights[l].a.size();
        for (std::size_t i = 0; i < delta.size(); ++i) {
            const double d = delta[i];
            if (d != 0.0)
                for (std::size_t j = 0; j < al.size(); ++j)
                    grad[w_off + i * al.size() + j] += d * al[j];
            grad[b_off + i] += d;
        }
        if (l == 0) break;
        const Activation act = m.layer_activation(l - 1);
        std::vector<double> prev(al.size(), 0.0);
        for (std::size_t i = 0; i < delta.size(); ++i) {
            const double d = delta[i];
            if (d == 0.0) continue;
            auto row = m.weights[l].row(i);
            for (std::size_t j = 0; j < prev.size(); ++j) prev[j] += d * row[j];
        }
        for (std::size_t j = 0; j < prev.size(); ++j) prev[j] *= activate_deriv(act, al[j]);
        delta = std::move(prev);
    }
}

}  // namespace detail

// Half mean squared error on the (scaled) targets.
inline double loss_half_mse(const MlpModel& m, const TrainSet& ts) {
    if (ts.size() == 0) raise(Errc::EmptyBatch, "loss");
    double s = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double r = ts.y[i] - m.forward(ts.x[i]);
        s += r * r;
    }
    return 0.5 * s / static_cast<double>(ts.size());
}

// Exact reverse-mode gradient of the half-MSE loss w.r.t. all parameters.
inline std::vector<double> gradient(const MlpModel& m, const TrainSet& ts) {
    if (ts.size() == 0) raise(Errc::EmptyBatch, "gradient");
    std::vector<double> grad(m.param_count(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        auto a = detail::forward_trace(m, ts.x[i]);
        const double r = ts.y[i] - a.back()[0];
        detail::backprop_into(m, a, -r * inv_n, grad);
    }
    return grad;
}

// Per-sample residual Jacobian, row i = d(y_i - f(x_i))/dtheta.
inline Matrix jacobian(const MlpModel& m, const TrainSet& ts) {
    if (ts.size() == 0) raise(Errc::EmptyBatch, "jacobian");
    Matrix j(ts.size(), m.param_count());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        auto a = detail::forward_trace(m, ts.x[i]);
        detail::backprop_into(m, a, -1.0, j.row(i));
    }
    return j;
}

struct LmConfig {
    double mu_init = 1e-3;
    double mu_increase = 10.0;
    double mu_decrease = 0.1;
    double mu_max = 1e10;
};

struct ScgConfig {
    double sigma_scale = 1e-4;   // finite-difference step scale for Hessian-vector products
    double lambda_init = 1e-14;  // trust-region regularizer; raised on demand
    double grad_tolerance = 1e-10;
};

struct TrainConfig {
    std::size_t max_epochs = 200;
    double loss_tolerance = 1e-10;
    std::uint64_t seed = 0;
    LmConfig lm;
    ScgConfig scg;
    std::size_t patience = 0;  // early stop on validation loss; 0 disables

    void validate() const {
        require(max_epochs >= 1, Errc::InvalidParams, "max_epochs");
        require(loss_tolerance > 0.0, Errc::InvalidParams, "loss_tolerance");
        require(lm.mu_init > 0.0 && lm.mu_max > 0.0, Errc::InvalidParams, "mu bounds");
        require(lm.mu_increase > 1.0 && lm.mu_decrease < 1.0 && lm.mu_decrease > 0.0,
                Errc::InvalidParams, "mu schedule");
        require(scg.sigma_scale > 0.0 && scg.lambda_init > 0.0, Errc::InvalidParams,
                "scg config");
    }
};

struct TrainReport {
    enum class Termination { ToleranceReached, MaxEpochs, MuLimit, GradientSmall, EarlyStop,
                             Stagnation };
    std::vector<double> train_loss;  // loss after each accepted epoch, starting at epoch 0
    std::vector<double> val_loss;
    Termination reason = Termination::MaxEpochs;
    std::size_t epochs = 0;
    double final_param_norm = 0.0;
    std::size_t iterations = 0;  // outer iterations, including rejected steps
};

inline const char* termination_name(TrainReport::Termination t) {
    switch (t) {
        case TrainReport::Termination::ToleranceReached: return "tolerance";
        case TrainReport::Termination::MaxEpochs: return "max_epochs";
        case TrainReport::Termination::MuLimit: return "mu_limit";
        case TrainReport::Termination::GradientSmall: return "gradient_small";
        case TrainReport::Termination::EarlyStop: return "early_stop";
        case TrainReport::Termination::Stagnation: return "stagnation";
    }
    return "?";
}

// Levenberg-Marquardt: damped Gauss-Newton steps with the classical
// multiply/divide mu schedule. Accepted steps strictly decrease the loss.
inline std::pair<MlpModel, TrainReport> train_lm(MlpModel model, const TrainSet& train,
                                                 const TrainConfig& config,
                                                 const TrainSet* val = nullptr) {
    config.validate();
    if (train.size() == 0) raise(Errc::EmptyBatch, "train_lm");
    TrainReport report;
    double loss = loss_half_mse(model, train);
    if (!std::isfinite(loss)) raise(Errc::NonFiniteLoss, "initial loss");
    report.train_loss.push_back(loss);
    if (val) report.val_loss.push_back(loss_half_mse(model, *val));

    double best_val = val ? report.val_loss.back() : 0.0;
    std::size_t since_best = 0;

    double mu = config.lm.mu_init;
    std::vector<double> theta = model.flatten();

    if (loss <= config.loss_tolerance) {
        report.reason = TrainReport::Termination::ToleranceReached;
        report.final_param_norm = norm2(theta);
        return {std::move(model), report};
    }

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        Matrix j = jacobian(model, train);
        std::vector<double> resid(train.size());
        for (std::size_t i = 0; i < train.size(); ++i)
            resid[i] = train.y[i] - model.forward(train.x[i]);
        Matrix jtj = normal_matrix(j);
        std::vector<double> jtr = matT_vec(j, resid);

        bool accepted = false;
        while (true) {
            ++report.iterations;
            Matrix damped = jtj;
            for (std::size_t d = 0; d < damped.rows; ++d) damped(d, d) += mu;
            std::vector<double> step;
            bool solved = cholesky_solve(std::move(damped), jtr, step);
            if (solved) {
                std::vector<double> trial(theta.size());
                for (std::size_t k = 0; k < theta.size(); ++k) trial[k] = theta[k] - step[k];
                MlpModel cand = model;
                cand.unflatten(trial);
                const double trial_loss = loss_half_mse(cand, train);
                if (std::isfinite(trial_loss) && trial_loss < loss) {
                    theta = std::move(trial);
                    model = std::move(cand);
                    loss = trial_loss;
                    mu = std::max(mu * config.lm.mu_decrease, 1e-20);
                    accepted = true;
                    break;
                }
            }
            mu *= config.lm.mu_increase;
            if (mu > config.lm.mu_max) {
                if (!solved) raise(Errc::SingularNormalMatrix, "no damping makes J'J + muI SPD");
                report.reason = TrainReport::Termination::MuLimit;
                report.epochs = epoch - 1;
                report.final_param_norm = norm2(theta);
                return {std::move(model), report};
            }
        }
        (void)accepted;
        report.train_loss.push_back(loss);
        report.epochs = epoch;
        if (val) {
            const double vl = loss_half_mse(model, *val);
            report.val_loss.push_back(vl);
            if (config.patience > 0) {
                if (vl < best_val) {
                    best_val = vl;
                    since_best = 0;
                } else if (++since_best >= config.patience) {
                    report.reason = TrainReport::Termination::EarlyStop;
                    report.final_param_norm = norm2(theta);
                    return {std::move(model), report};
                }
            }
        }
        if (loss <= config.loss_tolerance) {
            report.reason = TrainReport::Termination::ToleranceReached;
            report.final_param_norm = norm2(theta);
            return {std::move(model), report};
        }
    }
    report.reason = TrainReport::Termination::MaxEpochs;
    report.final_param_norm = norm2(theta);
    return {std::move(model), report};
}

// Moller's scaled conjugate gradient: conjugate directions with
// finite-difference Hessian-vector products and a lambda trust scaling,
// no line search. Weights change only on successful (loss-reducing) steps.
inline std::pair<MlpModel, TrainReport> train_scg(MlpModel model, const TrainSet& train,
                                                  const TrainConfig& config,
                                                  const TrainSet* val = nullptr) {
    config.validate();
    if (train.size() == 0) raise(Errc::EmptyBatch, "train_scg");
    TrainReport report;

    std::vector<double> theta = model.flatten();
    const std::size_t dim = theta.size();

    auto loss_at = [&](const std::vector<double>& t) {
        MlpModel m = model;
        m.unflatten(t);
        return loss_half_mse(m, train);
    };
    auto grad_at = [&](const std::vector<double>& t) {
        MlpModel m = model;
        m.unflatten(t);
        return gradient(m, train);
    };

    double loss = loss_at(theta);
    if (!std::isfinite(loss)) raise(Errc::NonFiniteLoss, "initial loss");
    report.train_loss.push_back(loss);
    if (val) report.val_loss.push_back(loss_half_mse(model, *val));

    std::vector<double> grad = grad_at(theta);
    std::vector<double> r(dim), p(dim);
    for (std::size_t k = 0; k < dim; ++k) r[k] = p[k] = -grad[k];

    double lambda = config.scg.lambda_init, lambda_bar = 0.0;
    bool success = true;
    double delta = 0.0;
    std::vector<double> s(dim);

    double best_val = val ? report.val_loss.back() : 0.0;
    std::size_t since_best = 0;

    auto finish = [&](TrainReport::Termination why) {
        report.reason = why;
        report.final_param_norm = norm2(theta);
        model.unflatten(theta);
        return std::make_pair(std::move(model), std::move(report));
    };

    if (loss <= config.loss_tolerance) return finish(TrainReport::Termination::ToleranceReached);
    if (norm2(r) <= config.scg.grad_tolerance)
        return finish(TrainReport::Termination::GradientSmall);

    for (std::size_t k = 1; k <= config.max_epochs; ++k) {
        ++report.iterations;
        const double p_norm2 = dot(p, p);
        const double p_norm = std::sqrt(p_norm2);
        if (success) {
            // second-order information along p by finite-differencing the gradient
            const double sigma = config.scg.sigma_scale / p_norm;
            std::vector<double> shifted(dim);
            for (std::size_t i = 0; i < dim; ++i) shifted[i] = theta[i] + sigma * p[i];
            std::vector<double> g2 = grad_at(shifted);
            for (std::size_t i = 0; i < dim; ++i) s[i] = (g2[i] - grad[i]) / sigma;
            delta = dot(p, s);
        }
        delta += (lambda - lambda_bar) * p_norm2;
        if (delta <= 0.0) {  // make the Hessian approximation positive definite
            lambda_bar = 2.0 * (lambda - delta / p_norm2);
            delta = -delta + lambda * p_norm2;
            lambda = lambda_bar;
        }
        const double mu = dot(p, r);
        if (mu <= 0.0) {  // degenerate direction, restart along the gradient
            p = r;
            success = true;
            continue;
        }
        const double alpha = mu / delta;

        std::vector<double> trial(dim);
        for (std::size_t i = 0; i < dim; ++i) trial[i] = theta[i] + alpha * p[i];
        const double trial_loss = loss_at(trial);
        if (!std::isfinite(trial_loss)) raise(Errc::NonFiniteLoss, "scg trial step");
        const double comparison = 2.0 * delta * (loss - trial_loss) / (mu * mu);

        if (comparison >= 0.0) {
            theta = std::move(trial);
            loss = trial_loss;
            grad = grad_at(theta);
            std::vector<double> r_new(dim);
            for (std::size_t i = 0; i < dim; ++i) r_new[i] = -grad[i];
            lambda_bar = 0.0;
            success = true;
            if (k % dim == 0) {
                p = r_new;  // restart along steepest descent
            } else {
                const double beta = (dot(r_new, r_new) - dot(r_new, r)) / mu;
                for (std::size_t i = 0; i < dim; ++i) p[i] = r_new[i] + beta * p[i];
            }
            r = std::move(r_new);
            if (comparison >= 0.75) lambda *= 0.25;
        } else {
            lambda_bar = lambda;
            success = false;
        }
        if (comparison < 0.25) lambda += delta * (1.0 - comparison) / p_norm2;
        if (lambda > 1e100) return finish(TrainReport::Termination::Stagnation);

        report.train_loss.push_back(loss);
        report.epochs = k;
        if (val) {
            MlpModel m = model;
            m.unflatten(theta);
            const double v = loss_half_mse(m, *val);
            report.val_loss.push_back(v);
            if (config.patience > 0) {
                if (v < best_val) {
                    best_val = v;
                    since_best = 0;
                } else if (++since_best >= config.patience) {
                    return finish(TrainReport::Termination::EarlyStop);
                }
            }
        }
        if (loss <= config.loss_tolerance)
            return finish(TrainReport::Termination::ToleranceReached);
        if (norm2(r) <= config.scg.grad_tolerance)
            return finish(TrainReport::Termination::GradientSmall);
    }
    return finish(TrainReport::Termination::MaxEpochs);
}

// Raw-deflection convenience: scale, run the network, map back to PCI units.
inline double predict_pci(const MlpModel& m, const std::array<double, kNumGeophones>& raw) {
    auto z = m.scaler.transform(raw);
    return m.scaler.unscale_target(m.forward(std::span<const double>(z.data(), z.size())));
}

}  // namespace roadinspect
