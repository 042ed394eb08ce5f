#include <catch2/catch_amalgamated.hpp>

#include "roadinspect/ensemble.hpp"

using namespace roadinspect;

TEST_CASE("combine applies coefficients exactly as stored", "[ensemble]") {
    auto ref = CmisModel::reference();
    // the published slopes sum to 1.001187, so all-100 inputs give 100.1187
    CHECK(combine(ref, {100.0, 100.0, 100.0, 100.0}) ==
          Catch::Approx(100.1187).margin(1e-9));

    CmisModel selector;
    selector.coefficients = {0.0, 1.0, 0.0, 0.0, 0.0};
    CHECK(combine(selector, {73.25, 10.0, 20.0, 30.0}) == 73.25);

    CmisModel zero;
    CHECK(combine(zero, {50.0, 60.0, 70.0, 80.0}) == 0.0);

    try {
        combine(ref, {1.0, std::numeric_limits<double>::infinity(), 2.0, 3.0});
        FAIL("expected NonFinitePrediction");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NonFinitePrediction);
    }
}

TEST_CASE("combine is affine", "[ensemble]") {
    auto ref = CmisModel::reference();
    Rng rng(2);
    double slope_sum = 0.0;
    for (std::size_t i = 1; i <= kCmisInputs; ++i) slope_sum += ref.coefficients[i];
    for (int trial = 0; trial < 50; ++trial) {
        std::array<double, 4> p{};
        for (double& v : p) v = rng.uniform(0.0, 100.0);
        const double a = rng.uniform(0.5, 2.0), b = rng.uniform(-5.0, 5.0);
        std::array<double, 4> ap{};
        for (std::size_t i = 0; i < 4; ++i) ap[i] = a * p[i] + b;
        const double lhs = combine(ref, ap);
        const double rhs =
            a * combine(ref, p) + b * slope_sum + (1.0 - a) * ref.coefficients[0];
        CHECK(lhs == Catch::Approx(rhs).margin(1e-9));
    }
}

namespace {

Matrix random_preds(Rng& rng, std::size_t n) {
    Matrix m(n, kCmisInputs);
    for (double& v : m.a) v = rng.uniform(0.0, 100.0);
    return m;
}

}  // namespace

TEST_CASE("fit recovers planted combinations", "[ensemble]") {
    Rng rng(10);
    const std::size_t n = 60;
    Matrix preds = random_preds(rng, n);

    // targets equal to column 1: selector fit, near-zero residual
    std::vector<double> t1(n);
    for (std::size_t i = 0; i < n; ++i) t1[i] = preds(i, 0);
    auto f1 = fit_weights(preds, t1);
    CHECK(f1.train_rmse <= 1e-10);
    CHECK(f1.model.coefficients[1] == Catch::Approx(1.0).margin(1e-8));
    CHECK(f1.model.coefficients[0] == Catch::Approx(0.0).margin(1e-7));

    // planted affine blend
    std::vector<double> t2(n);
    for (std::size_t i = 0; i < n; ++i) t2[i] = 5.0 + 0.5 * preds(i, 0) + 0.5 * preds(i, 1);
    auto f2 = fit_weights(preds, t2);
    CHECK(f2.model.coefficients[0] == Catch::Approx(5.0).margin(1e-8));
    CHECK(f2.model.coefficients[1] == Catch::Approx(0.5).margin(1e-8));
    CHECK(f2.model.coefficients[2] == Catch::Approx(0.5).margin(1e-8));
    CHECK(f2.model.coefficients[3] == Catch::Approx(0.0).margin(1e-8));
    CHECK(f2.model.coefficients[4] == Catch::Approx(0.0).margin(1e-8));
}

TEST_CASE("identical prediction columns are rejected as collinear", "[ensemble]") {
    Rng rng(11);
    Matrix preds = random_preds(rng, 30);
    for (std::size_t i = 0; i < 30; ++i) preds(i, 3) = preds(i, 2);
    std::vector<double> t(30, 50.0);
    for (std::size_t i = 0; i < 30; ++i) t[i] = preds(i, 0) * 0.7;
    try {
        fit_weights(preds, t);
        FAIL("expected RankDeficient");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::RankDeficient);
    }
}

TEST_CASE("least-squares residuals are orthogonal to the prediction columns",
          "[ensemble]") {
    Rng rng(12);
    const std::size_t n = 80;
    Matrix preds = random_preds(rng, n);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = rng.uniform(0.0, 100.0);
    auto fit = fit_weights(preds, t);
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::array<double, 4> p{preds(i, 0), preds(i, 1), preds(i, 2), preds(i, 3)};
        resid[i] = t[i] - combine(fit.model, p);
    }
    for (std::size_t j = 0; j < kCmisInputs; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += resid[i] * preds(i, j);
        CHECK(std::abs(s) / n < 1e-8);
    }
    double s0 = 0.0;
    for (double r : resid) s0 += r;
    CHECK(std::abs(s0) / n < 1e-8);
}

TEST_CASE("unconstrained fit never loses to a single model", "[ensemble]") {
    Rng rng(13);
    const std::size_t n = 100;
    Matrix preds = random_preds(rng, n);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = 0.3 * preds(i, 0) + 0.6 * preds(i, 2) + rng.gaussian() * 3.0;
    auto fit = fit_weights(preds, t);
    for (std::size_t j = 0; j < kCmisInputs; ++j) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = preds(i, j);
        double mse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = t[i] - col[i];
            mse += e * e;
        }
        const double rmse_j = std::sqrt(mse / n);
        CHECK(fit.train_rmse <= rmse_j + 1e-9);
    }
}

TEST_CASE("non-negative fit clamps slopes and still reduces error", "[ensemble]") {
    Rng rng(14);
    const std::size_t n = 70;
    Matrix preds = random_preds(rng, n);
    // target anti-correlated with column 3: unconstrained would go negative
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = 80.0 - 0.5 * preds(i, 2) + rng.gaussian();
    auto fit = fit_weights(preds, t, CmisConstraint::NonNegative);
    for (std::size_t j = 1; j <= kCmisInputs; ++j) CHECK(fit.model.coefficients[j] >= 0.0);

    // matches the planted model when the plant is itself non-negative
    std::vector<double> t2(n);
    for (std::size_t i = 0; i < n; ++i) t2[i] = 10.0 + 0.25 * preds(i, 1);
    auto fit2 = fit_weights(preds, t2, CmisConstraint::NonNegative);
    CHECK(fit2.model.coefficients[0] == Catch::Approx(10.0).margin(1e-6));
    CHECK(fit2.model.coefficients[2] == Catch::Approx(0.25).margin(1e-6));
    CHECK(fit2.train_rmse <= 1e-6);
}

TEST_CASE("fit input validation", "[ensemble]") {
    Rng rng(15);
    Matrix small = random_preds(rng, 4);
    std::vector<double> t(4, 1.0);
    try {
        fit_weights(small, t);
        FAIL("expected InvalidParams");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidParams);
    }
}
