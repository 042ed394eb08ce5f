#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "roadinspect/common.hpp"

namespace roadinspect {

// Black-box minimization problem over a box.
struct ObjectiveSpec {
    std::size_t dimension = 0;
    std::vector<double> lower, upper;
    std::function<double(std::span<const double>)> fitness;

    void validate() const {
        require(dimension >= 1, Errc::InvalidParams, "dimension");
        require(lower.size() == dimension && upper.size() == dimension, Errc::InvalidParams,
                "bounds arity");
        for (std::size_t i = 0; i < dimension; ++i)
            require(lower[i] < upper[i], Errc::InvalidParams, "bounds order");
        require(static_cast<bool>(fitness), Errc::InvalidParams, "fitness");
    }
};

struct GaConfig {
    std::size_t population_size = 50;
    std::size_t generations = 200;
    double crossover_rate = 0.9;
    double mutation_rate = 0.1;
    double mutation_scale = 0.1;  // fraction of each coordinate's range
    std::size_t tournament_size = 3;
    std::size_t elitism_count = 2;
    std::uint64_t seed = 0;
    std::size_t stagnation_limit = 50;

    void validate(std::size_t) const {
        require(population_size >= 2, Errc::InvalidParams, "population_size");
        require(crossover_rate >= 0.0 && crossover_rate <= 1.0, Errc::InvalidParams,
                "crossover_rate");
        require(mutation_rate >= 0.0 && mutation_rate <= 1.0, Errc::InvalidParams,
                "mutation_rate");
        require(mutation_scale >= 0.0, Errc::InvalidParams, "mutation_scale");
        require(tournament_size >= 1 && tournament_size <= population_size, Errc::InvalidParams,
                "tournament_size");
        require(elitism_count < population_size, Errc::InvalidParams, "elitism_count");
    }
};

struct IcaConfig {
    std::size_t n_countries = 50;
    std::size_t n_imperialists = 8;
    std::size_t max_decades = 200;
    double assimilation_beta = 2.0;
    double revolution_rate = 0.1;
    double colony_mean_weight = 0.1;  // xi in the empire-power formula
    std::uint64_t seed = 0;
    std::size_t stagnation_limit = 50;

    void validate() const {
        require(n_imperialists >= 1 && n_imperialists < n_countries, Errc::InvalidParams,
                "n_imperialists < n_countries required");
        require(assimilation_beta > 1.0, Errc::InvalidParams, "beta must be > 1");
        require(revolution_rate >= 0.0 && revolution_rate <= 1.0, Errc::InvalidParams,
                "revolution_rate");
        require(colony_mean_weight >= 0.0 && colony_mean_weight <= 1.0, Errc::InvalidParams,
                "colony_mean_weight");
    }
};

struct OptimizationTrace {
    enum class Stop { Budget, Stagnation, Unification };
    std::vector<double> best_cost_per_iter;  // best-ever after each generation/decade
    std::vector<double> best_vector;
    double best_cost = 0.0;
    std::size_t evaluations = 0;
    Stop reason = Stop::Budget;
};

inline const char* stop_name(OptimizationTrace::Stop s) {
    switch (s) {
        case OptimizationTrace::Stop::Budget: return "budget";
        case OptimizationTrace::Stop::Stagnation: return "stagnation";
        case OptimizationTrace::Stop::Unification: return "unification";
    }
    return "?";
}

// Per-decade ICA diagnostics, mainly for invariant checks.
struct IcaDecadeStats {
    std::size_t decade = 0;
    std::size_t n_empires = 0;
    std::size_t n_countries = 0;  // imperialists + colonies
    double roulette_power_sum = 0.0;
};

namespace detail {

inline double eval_fitness(const ObjectiveSpec& spec, std::span<const double> x,
                           std::size_t& evals) {
    const double f = spec.fitness(x);
    ++evals;
    if (!std::isfinite(f)) raise(Errc::NonFiniteFitness, "objective returned non-finite cost");
    return f;
}

inline void clip_to_bounds(const ObjectiveSpec& spec, std::vector<double>& x) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = clamp(x[i], spec.lower[i], spec.upper[i]);
}

inline std::vector<double> random_point(const ObjectiveSpec& spec, Rng& rng) {
    std::vector<double> x(spec.dimension);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(spec.lower[i], spec.upper[i]);
    return x;
}

}  // namespace detail

// Genetic algorithm: tournament selection, arithmetic blend crossover,
// Gaussian mutation clipped to bounds, elitism.
inline OptimizationTrace ga_optimize(const ObjectiveSpec& spec, const GaConfig& config) {
    spec.validate();
    config.validate(spec.dimension);
    Rng rng(config.seed);
    OptimizationTrace trace;

    std::vector<std::vector<double>> pop(config.population_size);
    std::vector<double> cost(config.population_size);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        pop[i] = detail::random_point(spec, rng);
        cost[i] = detail::eval_fitness(spec, pop[i], trace.evaluations);
    }

    auto best_idx = [&]() {
        std::size_t b = 0;
        for (std::size_t i = 1; i < cost.size(); ++i)
            if (cost[i] < cost[b]) b = i;
        return b;
    };
    std::size_t b0 = best_idx();
    trace.best_vector = pop[b0];
    trace.best_cost = cost[b0];

    auto tournament = [&]() {
        std::size_t winner = rng.below(pop.size());
        for (std::size_t t = 1; t < config.tournament_size; ++t) {
            std::size_t c = rng.below(pop.size());
            if (cost[c] < cost[winner]) winner = c;
        }
        return winner;
    };

    std::size_t stagnant = 0;
    for (std::size_t gen = 0; gen < config.generations; ++gen) {
        // elites survive unchanged
        std::vector<std::size_t> order(pop.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });
        std::vector<std::vector<double>> next;
        std::vector<double> next_cost;
        next.reserve(pop.size());
        for (std::size_t e = 0; e < config.elitism_count; ++e) {
            next.push_back(pop[order[e]]);
            next_cost.push_back(cost[order[e]]);
        }
        while (next.size() < pop.size()) {
            const auto& p1 = pop[tournament()];
            const auto& p2 = pop[tournament()];
            std::vector<double> c1 = p1, c2 = p2;
            if (rng.uniform01() < config.crossover_rate) {
                for (std::size_t d = 0; d < spec.dimension; ++d) {
                    const double u = rng.uniform01();
                    c1[d] = u * p1[d] + (1.0 - u) * p2[d];
                    c2[d] = (1.0 - u) * p1[d] + u * p2[d];
                }
            }
            for (auto* child : {&c1, &c2}) {
                for (std::size_t d = 0; d < spec.dimension; ++d)
                    if (rng.uniform01() < config.mutation_rate)
                        (*child)[d] += rng.gaussian() * config.mutation_scale *
                                       (spec.upper[d] - spec.lower[d]);
                detail::clip_to_bounds(spec, *child);
                if (next.size() < pop.size()) {
                    next_cost.push_back(detail::eval_fitness(spec, *child, trace.evaluations));
                    next.push_back(std::move(*child));
                }
            }
        }
        pop = std::move(next);
        cost = std::move(next_cost);

        const std::size_t b = best_idx();
        const double prev_best = trace.best_cost;
        if (cost[b] < trace.best_cost) {
            trace.best_cost = cost[b];
            trace.best_vector = pop[b];
        }
        trace.best_cost_per_iter.push_back(trace.best_cost);
        stagnant = (prev_best - trace.best_cost > 1e-12) ? 0 : stagnant + 1;
        if (stagnant >= config.stagnation_limit) {
            trace.reason = OptimizationTrace::Stop::Stagnation;
            return trace;
        }
    }
    trace.reason = OptimizationTrace::Stop::Budget;
    return trace;
}

// Imperialist competitive algorithm. Straight-line assimilation toward the
// imperialist, revolution as random reset, colony/imperialist exchange, and
// power-based competition for the weakest empire's weakest colony.
inline OptimizationTrace ica_optimize(
    const ObjectiveSpec& spec, const IcaConfig& config,
    const std::function<void(const IcaDecadeStats&)>& observer = nullptr) {
    spec.validate();
    config.validate();
    Rng rng(config.seed);
    OptimizationTrace trace;

    struct Country {
        std::vector<double> x;
        double cost = 0.0;
    };
    struct Empire {
        Country imperialist;
        std::vector<Country> colonies;
    };

    std::vector<Country> countries(config.n_countries);
    for (auto& c : countries) {
        c.x = detail::random_point(spec, rng);
        c.cost = detail::eval_fitness(spec, c.x, trace.evaluations);
    }
    std::stable_sort(countries.begin(), countries.end(),
                     [](const Country& a, const Country& b) { return a.cost < b.cost; });

    trace.best_vector = countries.front().x;
    trace.best_cost = countries.front().cost;

    // colonies allotted proportionally to normalized imperialist power
    const std::size_t n_imp = config.n_imperialists;
    const std::size_t n_col = config.n_countries - n_imp;
    std::vector<Empire> empires(n_imp);
    for (std::size_t i = 0; i < n_imp; ++i) empires[i].imperialist = countries[i];
    {
        double max_cost = countries[n_imp - 1].cost;
        std::vector<double> power(n_imp);
        double total = 0.0;
        for (std::size_t i = 0; i < n_imp; ++i) {
            power[i] = max_cost - countries[i].cost;
            total += power[i];
        }
        std::vector<std::size_t> share(n_imp, 0);
        if (total <= 0.0) {
            for (std::size_t i = 0; i < n_col; ++i) share[i % n_imp]++;
        } else {
            std::vector<double> exact(n_imp);
            std::size_t assigned = 0;
            for (std::size_t i = 0; i < n_imp; ++i) {
                exact[i] = power[i] / total * static_cast<double>(n_col);
                share[i] = static_cast<std::size_t>(std::floor(exact[i]));
                assigned += share[i];
            }
            // hand out the remainder by largest fractional part, low index first on ties
            std::vector<std::size_t> order(n_imp);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return exact[a] - std::floor(exact[a]) > exact[b] - std::floor(exact[b]);
            });
            for (std::size_t r = 0; assigned < n_col; ++r, ++assigned) share[order[r % n_imp]]++;
        }
        std::size_t next_colony = n_imp;
        for (std::size_t i = 0; i < n_imp; ++i)
            for (std::size_t k = 0; k < share[i] && next_colony < countries.size(); ++k)
                empires[i].colonies.push_back(countries[next_colony++]);
        // any rounding leftovers go to the strongest empire
        while (next_colony < countries.size())
            empires[0].colonies.push_back(countries[next_colony++]);
    }

    auto empire_total_cost = [&](const Empire& e) {
        double mean_colony = 0.0;
        if (!e.colonies.empty()) {
            for (const auto& c : e.colonies) mean_colony += c.cost;
            mean_colony /= static_cast<double>(e.colonies.size());
        }
        return e.imperialist.cost + config.colony_mean_weight * mean_colony;
    };

    std::size_t stagnant = 0;
    for (std::size_t decade = 0; decade < config.max_decades; ++decade) {
        const double prev_best = trace.best_cost;
        for (auto& emp : empires) {
            for (auto& col : emp.colonies) {
                // assimilation: uniform step in [0, beta] of the way to the imperialist
                const double t = config.assimilation_beta * rng.uniform01();
                for (std::size_t d = 0; d < spec.dimension; ++d)
                    col.x[d] += t * (emp.imperialist.x[d] - col.x[d]);
                detail::clip_to_bounds(spec, col.x);
                if (rng.uniform01() < config.revolution_rate)
                    col.x = detail::random_point(spec, rng);
                col.cost = detail::eval_fitness(spec, col.x, trace.evaluations);
                if (col.cost < emp.imperialist.cost) std::swap(col, emp.imperialist);
            }
            if (emp.imperialist.cost < trace.best_cost) {
                trace.best_cost = emp.imperialist.cost;
                trace.best_vector = emp.imperialist.x;
            }
        }

        double roulette_sum = 0.0;
        if (empires.size() > 1) {
            // imperialist competition over the weakest empire's weakest colony
            std::vector<double> total_cost(empires.size());
            for (std::size_t e = 0; e < empires.size(); ++e)
                total_cost[e] = empire_total_cost(empires[e]);
            std::size_t weakest = 0;
            for (std::size_t e = 1; e < empires.size(); ++e)
                if (total_cost[e] > total_cost[weakest]) weakest = e;

            const double worst = total_cost[weakest];
            std::vector<double> power(empires.size());
            double total_power = 0.0;
            for (std::size_t e = 0; e < empires.size(); ++e) {
                power[e] = worst - total_cost[e];
                total_power += power[e];
            }
            if (total_power <= 0.0) {
                for (auto& p : power) p = 1.0 / static_cast<double>(empires.size());
            } else {
                for (auto& p : power) p /= total_power;
            }
            for (double p : power) roulette_sum += p;

            const bool eliminate = empires[weakest].colonies.empty();
            Country victim;
            if (eliminate) {
                victim = empires[weakest].imperialist;
            } else {
                std::size_t w = 0;
                for (std::size_t c = 1; c < empires[weakest].colonies.size(); ++c)
                    if (empires[weakest].colonies[c].cost > empires[weakest].colonies[w].cost)
                        w = c;
                victim = empires[weakest].colonies[w];
                empires[weakest].colonies.erase(empires[weakest].colonies.begin() +
                                                static_cast<std::ptrdiff_t>(w));
            }

            const double u = rng.uniform01();
            double acc = 0.0;
            std::size_t winner = empires.size() - 1;
            for (std::size_t e = 0; e < empires.size(); ++e) {
                if (eliminate && e == weakest) continue;
                acc += power[e];
                if (u <= acc) {
                    winner = e;
                    break;
                }
            }
            if (eliminate && winner == weakest) winner = (weakest == 0) ? 1 : 0;
            empires[winner].colonies.push_back(std::move(victim));
            if (eliminate)
                empires.erase(empires.begin() + static_cast<std::ptrdiff_t>(weakest));
        }

        if (observer) {
            IcaDecadeStats stats;
            stats.decade = decade;
            stats.n_empires = empires.size();
            stats.n_countries = empires.size();
            for (const auto& e : empires) stats.n_countries += e.colonies.size();
            stats.roulette_power_sum = empires.size() > 1 ? roulette_sum : 1.0;
            observer(stats);
        }

        trace.best_cost_per_iter.push_back(trace.best_cost);
        stagnant = (prev_best - trace.best_cost > 1e-12) ? 0 : stagnant + 1;
        // a single empire from the start just assimilates; unification only
        // stops runs that collapsed down to one
        if (empires.size() == 1 && config.n_imperialists > 1) {
            trace.reason = OptimizationTrace::Stop::Unification;
            return trace;
        }
        if (stagnant >= config.stagnation_limit) {
            trace.reason = OptimizationTrace::Stop::Stagnation;
            return trace;
        }
    }
    trace.reason = OptimizationTrace::Stop::Budget;
    return trace;
}

// --- benchmark functions ---------------------------------------------------

inline double sphere_fn(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

inline double rastrigin_fn(std::span<const double> x) {
    const double two_pi = 2.0 * 3.141592653589793238462643383279502884;
    double s = 10.0 * static_cast<double>(x.size());
    for (double v : x) s += v * v - 10.0 * std::cos(two_pi * v);
    return s;
}

inline double rosenbrock_fn(std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        s += 100.0 * a * a + b * b;
    }
    return s;
}

inline ObjectiveSpec make_benchmark(const std::string& name, std::size_t dim) {
    require(dim >= 1, Errc::InvalidParams, "dim");
    ObjectiveSpec spec;
    spec.dimension = dim;
    if (name == "sphere") {
        spec.lower.assign(dim, -5.0);
        spec.upper.assign(dim, 5.0);
        spec.fitness = sphere_fn;
    } else if (name == "rastrigin") {
        spec.lower.assign(dim, -5.12);
        spec.upper.assign(dim, 5.12);
        spec.fitness = rastrigin_fn;
    } else if (name == "rosenbrock") {
        spec.lower.assign(dim, -2.048);
        spec.upper.assign(dim, 2.048);
        spec.fitness = rosenbrock_fn;
    } else {
        raise(Errc::InvalidParams, "unknown benchmark '" + name + "'");
    }
    return spec;
}

inline double benchmark_success_threshold(const std::string& name) {
    if (name == "sphere") return 1e-3;
    if (name == "rastrigin") return 1e-1;
    if (name == "rosenbrock") return 1e-1;
    raise(Errc::InvalidParams, "unknown benchmark '" + name + "'");
}

struct BenchmarkRow {
    std::string optimizer;
    std::string function;
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    double best_cost = 0.0;
    double threshold = 0.0;
    bool success = false;
};

inline std::vector<BenchmarkRow> benchmark_suite(const std::vector<std::string>& functions,
                                                 std::size_t dim, std::size_t n_seeds,
                                                 const GaConfig& ga_base,
                                                 const IcaConfig& ica_base) {
    std::vector<BenchmarkRow> rows;
    for (const auto& fn : functions) {
        const double threshold = benchmark_success_threshold(fn);
        for (std::uint64_t seed = 0; seed < n_seeds; ++seed) {
            ObjectiveSpec spec = make_benchmark(fn, dim);
            GaConfig ga = ga_base;
            ga.seed = seed;
            auto gt = ga_optimize(spec, ga);
            rows.push_back({"ga", fn, dim, seed, gt.best_cost, threshold,
                            gt.best_cost <= threshold});
            IcaConfig ica = ica_base;
            ica.seed = seed;
            auto it = ica_optimize(spec, ica);
            rows.push_back({"ica", fn, dim, seed, it.best_cost, threshold,
                            it.best_cost <= threshold});
        }
    }
    return rows;
}

}  // namespace roadinspect
