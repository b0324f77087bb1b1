#include <doctest.h>

#include <cmath>

#include "levygs/levy_model.hpp"

using namespace levygs;

namespace {
const LevyModel cl = LevyModel::cramer_lundberg(1.5, 1.0, {{1.0, 1.0}});
}

TEST_CASE("laplace exponent closed forms") {
    CHECK(cl.laplace_exponent(0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cl.laplace_exponent(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    auto bd = LevyModel::brownian_drift(1.0, 1.0);
    CHECK(bd.laplace_exponent(2.0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(std::fabs(cl.laplace_exponent(0.0)) <= 1e-12);
}

TEST_CASE("net profit and drift derivative") {
    CHECK(cl.psi_prime_at_zero() == doctest::Approx(0.5).epsilon(1e-12));
    auto bd = LevyModel::brownian_drift(0.7, 2.0);
    CHECK(bd.psi_prime_at_zero() == doctest::Approx(0.7).epsilon(1e-12));
    // Boundary of the net profit condition is rejected.
    CHECK_THROWS_AS(LevyModel::cramer_lundberg(1.0, 1.0, {{1.0, 1.0}}), ValidationError);
}

TEST_CASE("model structural validation") {
    CHECK_THROWS_AS(LevyModel::cramer_lundberg(1.5, 0.0, {}), ValidationError);
    CHECK_THROWS_AS(LevyModel::cramer_lundberg(-1.0, 1.0, {{1.0, 1.0}}), ValidationError);
    CHECK_THROWS_AS(LevyModel::brownian_drift(1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(LevyModel::cramer_lundberg(3.0, 1.0, {{0.5, 1.0}, {0.5, 1.0}}),
                    ValidationError);  // equal rates must be merged
    CHECK_THROWS_AS(LevyModel::cramer_lundberg(3.0, 1.0, {{0.7, 1.0}, {0.7, 2.0}}),
                    ValidationError);  // weights must sum to 1
}

TEST_CASE("levy tail") {
    CHECK(cl.levy_tail(1e-12) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cl.levy_tail(std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-12));
    auto bd = LevyModel::brownian_drift(1.0, 1.0);
    CHECK(bd.levy_tail(0.5) == 0.0);

    // Nonincreasing and vanishing at infinity.
    auto mix = LevyModel::cramer_lundberg(4.0, 2.0, {{0.25, 0.5}, {0.75, 3.0}});
    double prev = mix.levy_tail(1e-9);
    for (double z = 0.1; z < 60.0; z *= 1.7) {
        const double cur = mix.levy_tail(z);
        CHECK(cur <= prev + 1e-15);
        prev = cur;
    }
    CHECK(prev <= 1e-12);
}

TEST_CASE("variation classification") {
    CHECK(cl.variation_class() == VariationClass::Bounded);
    CHECK(LevyModel::brownian_drift(1.0, 1.0).variation_class() == VariationClass::Unbounded);
    CHECK(LevyModel::jump_diffusion(1.0, 0.5, 1.0, {{1.0, 2.0}}).variation_class() ==
          VariationClass::Unbounded);
}

TEST_CASE("psi is strictly convex and superlinear") {
    auto jd = LevyModel::jump_diffusion(1.0, 1.0, 0.5, {{0.4, 1.0}, {0.6, 2.5}});
    for (const LevyModel& m : {cl, jd}) {
        for (double a = 0.0; a < 8.0; a += 0.7) {
            const double b = a + 1.3;
            const double mid = m.laplace_exponent(0.5 * (a + b));
            const double chord = 0.5 * (m.laplace_exponent(a) + m.laplace_exponent(b));
            CHECK(mid < chord - 1e-10);
        }
        // psi(u)/u is nondecreasing along a doubling grid and psi diverges,
        // so Phi(q) is finite for every q >= 0. The ratio itself tends to
        // the premium rate for bounded variation and to infinity otherwise.
        double prev = -1e300;
        double psi_prev = 0.0;
        for (double u = 1.0; u <= 1024.0; u *= 2.0) {
            const double ratio = m.laplace_exponent(u) / u;
            CHECK(ratio > prev);
            prev = ratio;
            psi_prev = m.laplace_exponent(u);
        }
        CHECK(psi_prev > 1e3 * std::max(1.0, m.laplace_exponent(1.0)));
        if (m.sigma > 0.0) CHECK(prev > 100.0);
    }
}

TEST_CASE("jump integrals against the mixed-exponential measure") {
    QuadratureConfig cfg;
    // Total mass over (-inf, -z): matches the tail in closed form.
    const double t1 = integrate_jump_tail(cl, [](double) { return 1.0; }, 0.7, cfg);
    CHECK(t1 == doctest::Approx(cl.levy_tail(0.7)).epsilon(1e-9));
    // Finite window mass: tail difference.
    const double t2 =
        integrate_jump_interval(cl, [](double) { return 1.0; }, -2.0, -1.0, cfg);
    CHECK(t2 == doctest::Approx(cl.levy_tail(1.0) - cl.levy_tail(2.0)).epsilon(1e-9));
}
