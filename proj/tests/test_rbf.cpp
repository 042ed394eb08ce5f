#include <catch2/catch_amalgamated.hpp>

#include "roadinspect/rbf.hpp"

using namespace roadinspect;

namespace {

TrainSet random_points(Rng& rng, std::size_t n, std::size_t dim) {
    TrainSet ts;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(dim);
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        ts.x.push_back(std::move(x));
        ts.y.push_back(rng.uniform(-1.0, 1.0));
    }
    return ts;
}

}  // namespace

TEST_CASE("rbf forward basics", "[rbf]") {
    RbfModel m;
    m.centers = Matrix(1, 3);
    m.centers(0, 0) = 0.2;
    m.centers(0, 1) = -0.4;
    m.centers(0, 2) = 0.9;
    m.spread = 0.5;
    m.weights = {5.0};
    m.bias = 0.0;
    // input on the center: phi(0) = 1
    std::vector<double> at_center{0.2, -0.4, 0.9};
    CHECK(rbf_forward(m, at_center) == Catch::Approx(5.0));

    // all-zero weights return the bias
    RbfModel b = m;
    b.weights = {0.0};
    b.bias = -2.5;
    std::vector<double> anywhere{0.0, 0.0, 0.0};
    CHECK(rbf_forward(b, anywhere) == -2.5);

    // two centers, hand evaluation
    RbfModel two;
    two.centers = Matrix(2, 1);
    two.centers(0, 0) = 0.0;
    two.centers(1, 0) = 1.0;
    two.spread = 0.37;
    two.weights = {2.0, -1.0};
    two.bias = 0.5;
    const double x = 0.25;
    const double expected = 0.5 + 2.0 * std::exp(-(0.25 / 0.37) * (0.25 / 0.37)) -
                            1.0 * std::exp(-(0.75 / 0.37) * (0.75 / 0.37));
    std::vector<double> xv{x};
    CHECK(rbf_forward(two, xv) == Catch::Approx(expected).margin(1e-15));
}

TEST_CASE("rbf forward is radially symmetric under coordinate permutation", "[rbf]") {
    Rng rng(8);
    RbfModel m;
    m.centers = Matrix(4, 5);
    for (double& v : m.centers.a) v = rng.uniform(-1.0, 1.0);
    m.spread = 0.6;
    m.weights = {1.0, -0.5, 0.25, 2.0};
    m.bias = 0.1;
    std::vector<double> x(5);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    const double base = rbf_forward(m, x);
    // reverse all coordinates in both input and centers
    RbfModel p = m;
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t k = 0; k < 5; ++k) p.centers(j, k) = m.centers(j, 4 - k);
    std::vector<double> xr(x.rbegin(), x.rend());
    CHECK(rbf_forward(p, xr) == Catch::Approx(base).margin(1e-15));

    // bounded output: |f - bias| <= sum |w|
    double wsum = 0.0;
    for (double w : m.weights) wsum += std::abs(w);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> probe(5);
        for (double& v : probe) v = rng.uniform(-3.0, 3.0);
        CHECK(std::abs(rbf_forward(m, probe) - m.bias) <= wsum + 1e-12);
    }
}

TEST_CASE("exact interpolation with centers at the training points", "[rbf]") {
    for (std::size_t n : {5u, 20u, 55u}) {
        Rng rng(100 + n);
        TrainSet ts = random_points(rng, n, 7);
        Matrix centers(n, 7);
        for (std::size_t i = 0; i < n; ++i)
            std::copy(ts.x[i].begin(), ts.x[i].end(), centers.row(i).begin());
        auto w = solve_output_weights(centers, 0.37, ts, 0.0);
        RbfModel m;
        m.centers = centers;
        m.spread = 0.37;
        m.weights = w.weights;
        m.bias = w.bias;
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(ts.y[i] - rbf_forward(m, ts.x[i])));
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("constant targets are fit exactly", "[rbf]") {
    Rng rng(3);
    TrainSet ts = random_points(rng, 12, 4);
    for (double& y : ts.y) y = 4.25;
    Matrix centers(3, 4);
    for (double& v : centers.a) v = rng.uniform(-1.0, 1.0);
    auto w = solve_output_weights(centers, 0.5, ts, 0.0);
    RbfModel m{centers, 0.5, w.weights, w.bias, {}};
    for (std::size_t i = 0; i < ts.size(); ++i)
        CHECK(rbf_forward(m, ts.x[i]) == Catch::Approx(4.25).margin(1e-10));
}

TEST_CASE("large ridge shrinks the kernel weights toward zero", "[rbf]") {
    Rng rng(4);
    TrainSet ts = random_points(rng, 30, 7);
    Matrix centers(10, 7);
    for (double& v : centers.a) v = rng.uniform(-1.0, 1.0);
    auto w = solve_output_weights(centers, 0.37, ts, 1e12);
    CHECK(norm2(w.weights) <= 1e-4);
}

TEST_CASE("duplicate centers make the unridged solve singular", "[rbf]") {
    Rng rng(6);
    TrainSet ts = random_points(rng, 10, 3);
    Matrix centers(4, 3);
    for (double& v : centers.a) v = rng.uniform(-1.0, 1.0);
    for (std::size_t k = 0; k < 3; ++k) centers(3, k) = centers(0, k);  // duplicate
    try {
        solve_output_weights(centers, 0.5, ts, 0.0);
        FAIL("expected SingularSystem");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::SingularSystem);
    }
    // the default ridge keeps it solvable
    auto w = solve_output_weights(centers, 0.5, ts, 1e-8);
    CHECK(w.weights.size() == 4);
}

TEST_CASE("solved weights are a local optimum of the ridge objective", "[rbf]") {
    Rng rng(12);
    TrainSet ts = random_points(rng, 25, 5);
    Matrix centers(6, 5);
    for (double& v : centers.a) v = rng.uniform(-1.0, 1.0);
    const double ridge = 1e-6;
    auto sol = solve_output_weights(centers, 0.45, ts, ridge);

    auto objective = [&](const std::vector<double>& w, double b) {
        RbfModel m{centers, 0.45, w, b, {}};
        double s = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double r = ts.y[i] - rbf_forward(m, ts.x[i]);
            s += r * r;
        }
        for (double v : w) s += ridge * v * v;
        return s;
    };
    const double base = objective(sol.weights, sol.bias);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> w = sol.weights;
        double b = sol.bias;
        for (double& v : w) v += rng.uniform(-1e-4, 1e-4);
        b += rng.uniform(-1e-4, 1e-4);
        CHECK(objective(w, b) >= base - 1e-12);
    }
}

TEST_CASE("genome encode/decode round trip", "[rbf]") {
    Rng rng(9);
    RbfModel m;
    m.centers = Matrix(5, 7);
    for (double& v : m.centers.a) v = rng.uniform(-1.0, 1.0);
    m.spread = 0.37;
    m.weights.assign(5, 0.0);
    auto genome = encode_genome(m);
    CHECK(genome.size() == 5 * 7 + 1);

    Matrix back_centers;
    double back_spread = 0.0;
    decode_genome(genome, 5, 7, back_centers, back_spread);
    CHECK(back_centers.a == m.centers.a);
    CHECK(back_spread == Catch::Approx(m.spread).margin(1e-15));

    // perturbing one coordinate changes exactly one center entry or the spread
    auto g2 = genome;
    g2[11] += 0.25;
    Matrix c2;
    double s2 = 0.0;
    decode_genome(g2, 5, 7, c2, s2);
    std::size_t diffs = 0;
    for (std::size_t i = 0; i < c2.a.size(); ++i)
        if (c2.a[i] != back_centers.a[i]) ++diffs;
    CHECK(diffs == 1);
    CHECK(s2 == back_spread);

    try {
        decode_genome(genome, 4, 7, back_centers, back_spread);
        FAIL("expected LengthMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::LengthMismatch);
    }
}

TEST_CASE("planted rbf recovery with both optimizers", "[rbf]") {
    // noiseless data generated by a known 3-center network
    Rng rng(77);
    RbfModel truth;
    truth.centers = Matrix(3, 7);
    for (double& v : truth.centers.a) v = rng.uniform(-0.8, 0.8);
    truth.spread = 0.5;
    truth.weights = {1.2, -0.7, 0.9};
    truth.bias = 0.1;
    TrainSet ts;
    for (int i = 0; i < 40; ++i) {
        std::vector<double> x(7);
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        ts.y.push_back(rbf_forward(truth, x));
        ts.x.push_back(std::move(x));
    }

    for (auto opt : {RbfOptimizer::Ga, RbfOptimizer::Ica}) {
        RbfTrainConfig cfg;
        cfg.n_centers = 3;
        cfg.spread_init = 0.5;
        cfg.ridge = 1e-10;
        cfg.optimizer = opt;
        cfg.seed = 11;
        cfg.ga.generations = 200;
        cfg.ica.max_decades = 200;
        auto res = train_rbf(ts, cfg);
        double mse = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double r = ts.y[i] - rbf_forward(res.model, ts.x[i]);
            mse += r * r;
        }
        mse /= static_cast<double>(ts.size());
        CHECK(mse <= 1e-4);
        CHECK(mse == Catch::Approx(res.trace.best_cost).margin(1e-12));
        // best-ever fitness non-increasing
        for (std::size_t i = 1; i < res.trace.best_cost_per_iter.size(); ++i)
            CHECK(res.trace.best_cost_per_iter[i] <= res.trace.best_cost_per_iter[i - 1]);
    }
}

TEST_CASE("rbf training is deterministic and budget-degenerate safe", "[rbf]") {
    Rng rng(15);
    TrainSet ts = random_points(rng, 30, 7);
    RbfTrainConfig cfg;
    cfg.n_centers = 5;
    cfg.seed = 3;
    cfg.ga.generations = 25;
    auto a = train_rbf(ts, cfg);
    auto b = train_rbf(ts, cfg);
    CHECK(a.model.centers.a == b.model.centers.a);
    CHECK(a.model.weights == b.model.weights);
    CHECK(a.model.spread == b.model.spread);
    CHECK(a.model.bias == b.model.bias);

    // one-generation budget still returns the best of the initial population
    RbfTrainConfig one = cfg;
    one.ga.generations = 1;
    auto c = train_rbf(ts, one);
    CHECK(c.trace.best_cost_per_iter.size() == 1);
    CHECK(std::isfinite(c.trace.best_cost));
}
