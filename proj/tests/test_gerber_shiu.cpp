#include <doctest.h>

#include <cmath>

#include "levygs/gerber_shiu.hpp"
#include "oracles.hpp"

using namespace levygs;

namespace {
const LevyModel cl = LevyModel::cramer_lundberg(1.5, 1.0, {{1.0, 1.0}});
const LevyModel jd = LevyModel::jump_diffusion(1.0, 1.0, 0.5, {{1.0, 1.0}});
const LevyModel bd = LevyModel::brownian_drift(1.0, 1.0);
const SeverityDistribution pm1 = SeverityDistribution::point_mass(1.0);
const SeverityDistribution pm0 = SeverityDistribution::point_mass(0.0);
const CreepClock clk{1.0};

GsOptions fast_opts() {
    GsOptions o;
    o.quad.rel_tol = 1e-7;
    o.quad.abs_tol = 1e-10;
    return o;
}
}

TEST_CASE("terms vanish without jumps") {
    GsOptions opt = fast_opts();
    auto W = build_scale(bd, 0.05);
    CHECK(term_A(W, 4.0, PenaltySpec::one(), pm1, opt) == 0.0);
    CHECK(term_B(W, 4.0, PenaltySpec::one(), pm1, opt) == 0.0);
    CHECK(term_D(W, 4.0, pm1, opt) == 0.0);
    CHECK(term_E(W, 4.0, pm1, opt) == 0.0);
    CHECK(term_U(W, 4.0, PenaltySpec::one(), pm1, opt) == 0.0);
    CHECK(term_I(W, 1.0, 4.0, PenaltySpec::one(), pm1, opt) == 0.0);
    // F and C keep only their creeping summand.
    const double slope_part =
        -0.5 * expect_over_Y(pm1, [&](double Y) {
            return std::exp(-W.phi() * Y) * creep_kernel_slope_at_top(W, Y);
        }, opt.quad);
    CHECK(term_F(W, pm1, opt) == doctest::Approx(slope_part).epsilon(1e-10));
}

TEST_CASE("degenerate severity collapses the interval terms") {
    GsOptions opt = fast_opts();
    auto W = build_scale(cl, 0.0);
    CHECK(term_B(W, 5.0, PenaltySpec::one(), pm0, opt) == 0.0);
    // Expectation over a zero mark collapses A to the plain double integral.
    const double a0 = term_A(W, 5.0, PenaltySpec::one(), pm0, opt);
    const double direct = integrate(
        [&](double y) {
            return (W.W(5.0 - y) / W.W(5.0)) *
                   integrate_jump_tail(cl, [](double) { return 1.0; }, y, opt.quad);
        },
        0.0, 5.0, opt.quad);
    CHECK(a0 == doctest::Approx(direct).epsilon(1e-8));
    // Empty mark interval: denominator is exactly the premium rate.
    CHECK(denominator_bv(W, 5.0, pm0, opt) == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("excursion-length block is continuous at lambda -> 0") {
    GsOptions opt = fast_opts();
    auto Wq = build_scale(bd, 0.05);
    auto W0 = build_scale(bd, 0.0);
    auto Wl = build_scale(bd, 0.05 + 1e-9);
    CHECK(std::fabs(term_J(Wq, Wl, W0, 1e-9, 4.0, opt)) < 1e-7);
}

TEST_CASE("classical two-sided ruin value matches the scale ratio") {
    GsOptions opt = fast_opts();
    auto W = build_scale(cl, 0.0);
    const double v = classical_gs(W, 1.0, 2.0, PenaltySpec::one(), opt);
    CHECK(v == doctest::Approx(1.0 - W.W(1.0) / W.W(2.0)).epsilon(1e-7));
    // Started at the barrier the up-crossing is immediate.
    CHECK(classical_gs(W, 2.0, 2.0, PenaltySpec::one(), opt) ==
          doctest::Approx(0.0).epsilon(1e-10));
    // Pure diffusion: only the creeping summand survives.
    auto Wb = build_scale(bd, 0.05);
    const double vb = classical_gs(Wb, 1.0, 3.0, PenaltySpec::one(), opt);
    CHECK(vb == doctest::Approx(0.5 * creep_kernel(Wb, 3.0, 1.0)).epsilon(1e-10));
}

TEST_CASE("zero-mark value reduces to the classical penalty at x -> 0+") {
    GsOptions opt;
    opt.quad.rel_tol = 1e-11;
    opt.quad.abs_tol = 1e-14;
    for (const auto& f : {PenaltySpec::one(), PenaltySpec::exp_deficit(0.5)}) {
        for (double q : {0.0, 0.05, 1.0}) {
            for (double b : {2.0, 5.0}) {
                auto r = phi0_bounded_variation(cl, q, b, f, pm0, opt);
                auto W = build_scale(cl, q);
                const double cgs = classical_gs(W, 0.0, b, f, opt);
                CHECK(r.value == doctest::Approx(cgs).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("bounded-variation assembly basics") {
    GsOptions opt = fast_opts();
    auto r = phi0_bounded_variation(cl, 0.0, 5.0, PenaltySpec::one(),
                                    SeverityDistribution::exponential(1.0), opt);
    CHECK(r.value >= 0.0);
    CHECK(r.value <= 1.0);
    CHECK(r.value == doctest::Approx(r.numerator / r.denominator));
    CHECK(r.denominator > 0.0);
    CHECK(r.denominator <= 1.5 + 1e-12);
    CHECK(r.terms.at("A") > 0.0);
    CHECK(r.terms.at("B") > 0.0);
}

TEST_CASE("mark stochastic-order monotonicity at q=0") {
    GsOptions opt = fast_opts();
    double prev = 2.0;
    for (double y0 : {0.5, 1.0, 2.0, 4.0}) {
        auto r = phi0_bounded_variation(cl, 0.0, 5.0, PenaltySpec::one(),
                                        SeverityDistribution::point_mass(y0), opt);
        CHECK(r.value <= prev + 1e-8);
        prev = r.value;
    }
}

TEST_CASE("dominance by the classical ruin penalty") {
    GsOptions opt = fast_opts();
    for (double x : {0.0, 1.0, 3.0}) {
        for (double q : {0.0, 0.05}) {
            auto r = phi_x(cl, x, q, 5.0, PenaltySpec::one(), pm1, clk, opt);
            auto W = build_scale(cl, q);
            const double cgs = classical_gs(W, x, 5.0, PenaltySpec::one(), opt);
            CHECK(r.value <= cgs + 1e-8);
        }
    }
}

TEST_CASE("unbounded-variation assembly and its guards") {
    GsOptions opt = fast_opts();
    auto r = phi0_unbounded_variation(bd, 0.05, 4.0, PenaltySpec::one(), pm1, clk, opt);
    CHECK(r.value > 0.0);
    CHECK(r.value < 1.0);
    CHECK(r.denominator > 0.0);
    CHECK(r.terms.at("A") == 0.0);
    CHECK(r.terms.at("C") > 0.0);
    CHECK(r.terms.at("J") > 0.0);
    // Severity laws with mass at (or arbitrarily close to) 0 have no
    // nondegenerate value here.
    CHECK_THROWS_AS(phi0_unbounded_variation(bd, 0.05, 4.0, PenaltySpec::one(), pm0, clk, opt),
                    ValidationError);
    CHECK_THROWS_AS(phi0_unbounded_variation(bd, 0.05, 4.0, PenaltySpec::one(),
                                             SeverityDistribution::exponential(1.0), clk, opt),
                    ValidationError);
    CHECK_THROWS_AS(phi0_unbounded_variation(cl, 0.05, 4.0, PenaltySpec::one(), pm1, clk, opt),
                    DomainError);
}

TEST_CASE("denominator leading term trends to its barrier limit") {
    GsOptions opt = fast_opts();
    auto W = build_scale(bd, 0.05);
    // e^{Phi(q) b} / W(b) decreases monotonically toward psi'(Phi(q)).
    const double limit = bd.psi_prime(W.phi());
    double prev = 1e300;
    for (double b : {2.0, 4.0, 8.0}) {
        const double lead = std::exp(W.phi() * b) / W.W(b);
        CHECK(lead > limit - 1e-12);
        CHECK(lead < prev);
        prev = lead;
        auto r = phi0_unbounded_variation(bd, 0.05, b, PenaltySpec::one(), pm1, clk, opt);
        CHECK(r.denominator > lead - 1e-10);
    }
    CHECK(prev == doctest::Approx(limit).epsilon(1e-6));
}

TEST_CASE("positive-surplus assembly") {
    GsOptions opt = fast_opts();
    // Delegation at x = 0 is exact.
    auto r0 = phi_x(cl, 0.0, 0.05, 5.0, PenaltySpec::one(), pm1, clk, opt);
    auto p0 = phi0_bounded_variation(cl, 0.05, 5.0, PenaltySpec::one(), pm1, opt);
    CHECK(r0.value == doctest::Approx(p0.value).epsilon(1e-12));
    // Continuity at x -> 0+ (the kernels reduce to the zero-start ones).
    auto re = phi_x(cl, 1e-7, 0.05, 5.0, PenaltySpec::one(), pm1, clk, opt);
    CHECK(re.value == doctest::Approx(p0.value).epsilon(1e-5));
    auto ru0 = phi0_unbounded_variation(jd, 0.05, 4.0, PenaltySpec::one(), pm1, clk, opt);
    auto rue = phi_x(jd, 1e-6, 0.05, 4.0, PenaltySpec::one(), pm1, clk, opt);
    CHECK(rue.value == doctest::Approx(ru0.value).epsilon(1e-5));
    // At the barrier every kernel vanishes.
    auto rb = phi_x(cl, 5.0, 0.05, 5.0, PenaltySpec::one(), pm1, clk, opt);
    CHECK(rb.value == doctest::Approx(0.0).epsilon(1e-10));
    // sigma = 0 keeps only the jump channels.
    auto rx = phi_x(cl, 1.0, 0.05, 5.0, PenaltySpec::one(), pm1, clk, opt);
    CHECK(rx.terms.at("x_creep_gap") == 0.0);
    CHECK(rx.value ==
          doctest::Approx(rx.terms.at("x_jump") + rx.terms.at("I") +
                          rx.terms.at("x_recovery_weight") * p0.value).epsilon(1e-10));
}

TEST_CASE("smoke oracle agreement for two representative terms") {
    GsOptions opt = fast_opts();
    oracles::Grid g{250};
    auto Wq = build_scale(cl, 0.0);
    const double a_adaptive = term_A(Wq, 5.0, PenaltySpec::one(),
                                     SeverityDistribution::exponential(1.0), opt);
    const double a_riemann = oracles::term_A(Wq, 5.0, PenaltySpec::one(),
                                             SeverityDistribution::exponential(1.0), g);
    CHECK(a_adaptive == doctest::Approx(a_riemann).epsilon(5e-3));

    auto Wj = build_scale(jd, 0.05);
    const double u_adaptive = term_U(Wj, 5.0, PenaltySpec::one(), pm1, opt);
    const double u_riemann = oracles::term_U(Wj, 5.0, PenaltySpec::one(), pm1, g);
    CHECK(u_adaptive == doctest::Approx(u_riemann).epsilon(5e-3));
}

TEST_CASE("result range check trips on impossible assemblies") {
    CHECK_THROWS_AS(check_value_range(-0.5, 1.0), NumericalInstability);
    CHECK_THROWS_AS(check_value_range(1.5, 1.0), NumericalInstability);
}
