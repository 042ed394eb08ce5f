#include <catch2/catch_amalgamated.hpp>

#include "roadinspect/baselines.hpp"

using namespace roadinspect;

TEST_CASE("basin slope and area", "[baselines]") {
    CHECK(basin_diff(7.0, 7.0) == 0.0);
    CHECK(basin_diff(20.0, 10.0) == Catch::Approx(0.5));
    try {
        basin_diff(0.0, 0.0);
        FAIL("expected ZeroCenterDeflection");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ZeroCenterDeflection);
    }

    CHECK(basin_area(0.0, 0.0) == 0.0);
    CHECK(basin_area(10.0, 5.0) == Catch::Approx(180.0));
    CHECK(basin_area(1.0, 0.0) == Catch::Approx(12.0));
    try {
        basin_area(-1.0, 2.0);
        FAIL("expected NegativeDeflection");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NegativeDeflection);
    }

    // area is symmetric and linear
    CHECK(basin_area(3.0, 9.0) == basin_area(9.0, 3.0));
    CHECK(basin_area(2.0 * 3.0, 2.0 * 9.0) == Catch::Approx(2.0 * basin_area(3.0, 9.0)));
}

TEST_CASE("deflection-based predictor", "[baselines]") {
    // AGE = 0 kills every subtracted term
    ObrienInputs fresh{0.0, 0.0, 5.0, 2.0, 20.0, 10.0};
    CHECK(obrien_pci(fresh).raw == Catch::Approx(96.6));

    // flat basin: DIFF = 0 annihilates every term
    ObrienInputs flat{12.0, 8.0, 15.0, 3.0, 9.0, 9.0};
    CHECK(obrien_pci(flat).raw == Catch::Approx(96.6));

    // term-by-term hand evaluation, frozen
    ObrienInputs in{1.0, 1.0, 1.0, 1.0, 20.0, 10.0};
    const double diff = 0.5, area = 360.0;
    const double expected = 96.6 - (0.000572 * 1.0 * 1.0 * diff * area +
                                    0.3062 * 1.0 * 1.0 * diff * diff +
                                    0.00156 * 1.0 * 1.0 * 1.0 * diff * area);
    CHECK(obrien_pci(in).raw == Catch::Approx(expected).margin(1e-12));
    CHECK(obrien_pci(in).raw == Catch::Approx(96.13969).margin(1e-9));

    // subtracted terms are non-negative for non-negative inputs with DIFF >= 0
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        double d12 = rng.uniform(0.0, 20.0);
        double d0 = d12 + rng.uniform(0.0, 20.0) + 1e-6;
        ObrienInputs r{rng.uniform(0.0, 30.0), 0.0, 0.0, rng.uniform(0.0, 5.0), d0, d12};
        r.age_to_overlay = rng.uniform(0.0, 30.0);
        r.age_total = r.age_to_overlay + rng.uniform(0.0, 10.0);
        CHECK(obrien_pci(r).raw <= 96.6 + 1e-12);
    }
}

TEST_CASE("roughness-based predictors", "[baselines]") {
    CHECK(park_pci(1.0) == Catch::Approx(100.0));
    CHECK(park_pci(10.0) == Catch::Approx(std::pow(10.0, 1.564)).epsilon(1e-12));
    CHECK(park_pci(10.0) == Catch::Approx(36.6438).margin(5e-4));
    try {
        park_pci(0.0);
        FAIL("expected NonPositiveIri");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NonPositiveIri);
    }
    // strictly decreasing
    double prev = park_pci(0.25);
    for (double iri = 0.5; iri < 16.0; iri += 0.25) {
        double v = park_pci(iri);
        CHECK(v < prev);
        prev = v;
    }

    auto zero = dewan_smith_pci(0.0);
    CHECK(zero.raw == Catch::Approx(153.0));
    CHECK(zero.clamped == 100.0);
    CHECK(dewan_smith_pci(0.9063).raw == Catch::Approx(100.0).margin(1e-9));
    CHECK(dewan_smith_pci(2.6163).raw == Catch::Approx(0.0).margin(1e-9));
    try {
        dewan_smith_pci(-0.1);
        FAIL("expected NegativeIri");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NegativeIri);
    }
}

TEST_CASE("age-based predictors", "[baselines]") {
    CHECK(age_curve_pci(0.0, 100.0, -3.0, 1.5) == Catch::Approx(100.0));
    CHECK(age_curve_pci(10.0, 100.0, -2.0, 1.0) == Catch::Approx(80.0));
    CHECK(age_curve_pci(5.0, 100.0, -1.0, 2.0) == Catch::Approx(75.0));

    CHECK(michles_pci(0, 0.0) == Catch::Approx(71.09));
    CHECK(michles_pci(1, 0.0) == Catch::Approx(98.51));
    CHECK(michles_pci(1, 10.0) == Catch::Approx(57.81));
    try {
        michles_pci(2, 1.0);
        FAIL("expected InvalidTreatment");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidTreatment);
    }
}
