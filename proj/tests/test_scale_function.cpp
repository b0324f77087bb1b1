#include <doctest.h>

#include <cmath>
#include <complex>

#include "levygs/laplace.hpp"
#include "levygs/scale_function.hpp"

using namespace levygs;

namespace {
const LevyModel cl = LevyModel::cramer_lundberg(1.5, 1.0, {{1.0, 1.0}});
// Closed form for cl at q=0: W(x) = 2 - (4/3) e^{-x/3}.
double cl_W0(double x) { return x < 0.0 ? 0.0 : 2.0 - (4.0 / 3.0) * std::exp(-x / 3.0); }
}

TEST_CASE("scale closed form for Cramer-Lundberg at q=0") {
    auto W = build_scale(cl, 0.0);
    CHECK(W.phi() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(W.W(0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(W.W(1.0) == doctest::Approx(cl_W0(1.0)).epsilon(1e-12));
    CHECK(W.W(1.0) == doctest::Approx(1.0446249).epsilon(1e-7));
    CHECK(W.W(-1.0) == 0.0);
    CHECK(W.Z(-1.0) == 1.0);
    CHECK(W.Z(2.0) == 1.0);  // q = 0
}

TEST_CASE("Phi at positive rates") {
    CHECK(build_scale(cl, 1.0).phi() == doctest::Approx(1.0).epsilon(1e-10));
    auto bd = LevyModel::brownian_drift(1.0, 1.0);
    CHECK(build_scale(bd, 1.5).phi() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(build_scale(bd, 1.5).phi_prime() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("toy zero-drift Brownian scale W(x) = x") {
    // psi'(0+) = 0, so this model fails the admissibility gate and is built
    // from the raw structure for kernel unit tests only.
    LevyModel toy{LevyKind::BrownianDrift, 0.0, std::sqrt(2.0), 0.0, {}};
    auto W = ScaleFunction::build(toy, 0.0);
    CHECK(W.phi() == doctest::Approx(0.0));
    for (double x : {0.25, 1.0, 3.0}) {
        CHECK(W.W(x) == doctest::Approx(x).epsilon(1e-12));
        CHECK(W.W_prime(x) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(W.W_second(x) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(creep_kernel(W, 2.0, x) == doctest::Approx(1.0 - x / 2.0).epsilon(1e-12));
    }
    CHECK(creep_kernel_slope_at_top(W, 2.0) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("initial values by variation class") {
    for (double q : {0.0, 0.05, 1.0}) {
        auto Wb = build_scale(cl, q);
        CHECK(Wb.W(0.0) == doctest::Approx(1.0 / 1.5).epsilon(1e-8));
        auto Wu = build_scale(LevyModel::jump_diffusion(1.0, 1.0, 0.5, {{1.0, 1.0}}), q);
        CHECK(Wu.W(0.0) == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(Wu.W_prime(0.0) == doctest::Approx(2.0).epsilon(1e-8));
    }
}

TEST_CASE("Laplace transform identity across families and rates") {
    const LevyModel models[] = {
        cl,
        LevyModel::cramer_lundberg(4.0, 2.0, {{0.25, 0.5}, {0.75, 3.0}}),
        LevyModel::brownian_drift(1.0, 1.0),
        LevyModel::jump_diffusion(1.0, 1.0, 0.5, {{1.0, 1.0}}),
        LevyModel::jump_diffusion(0.8, 1.3, 0.7, {{0.3, 0.8}, {0.7, 2.2}}),
    };
    for (const auto& m : models) {
        for (double q : {0.0, 0.05, 1.0}) {
            auto W = build_scale(m, q);
            for (int i = 0; i < 20; ++i) {
                // 20 log-spaced points in (Phi(q)+0.1, Phi(q)+50).
                const double lam = W.phi() + 0.1 * std::pow(500.0, i / 19.0);
                const double resid =
                    (m.laplace_exponent(lam) - q) * W.laplace_W(lam) - 1.0;
                CHECK(std::fabs(resid) <= 1e-8);
            }
        }
    }
}

TEST_CASE("Z identity against quadrature of W") {
    QuadratureConfig cfg;
    auto W = build_scale(cl, 0.7);
    for (double x : {0.3, 1.0, 2.5, 4.0}) {
        const double zi = 1.0 + 0.7 * integrate([&](double t) { return W.W(t); }, 0.0, x, cfg);
        CHECK(W.Z(x) == doctest::Approx(zi).epsilon(1e-10));
    }
}

TEST_CASE("two-sided exit ratio lies in (0,1] and is nondecreasing") {
    auto W = build_scale(cl, 0.05);
    const double a = 3.0;
    double prev = 0.0;
    for (double x = 0.1; x <= a + 1e-12; x += 0.1) {
        const double r = W.W(x) / W.W(a);
        CHECK(r > 0.0);
        CHECK(r <= 1.0 + 1e-12);
        CHECK(r >= prev - 1e-12);
        prev = r;
    }
}

TEST_CASE("scale function positive and nondecreasing on (0,inf)") {
    for (double q : {0.0, 0.4}) {
        auto W = build_scale(LevyModel::jump_diffusion(1.0, 1.0, 0.5, {{1.0, 1.0}}), q);
        double prev = 0.0;
        for (double x = 0.05; x < 8.0; x += 0.05) {
            const double w = W.W(x);
            CHECK(w > 0.0);
            CHECK(w >= prev - 1e-12);
            prev = w;
        }
    }
}

TEST_CASE("closed form vs numerical Laplace inversion") {
    const LevyModel models[] = {cl, LevyModel::brownian_drift(1.0, 1.0),
                                LevyModel::jump_diffusion(1.0, 1.0, 0.5, {{1.0, 1.0}})};
    for (const auto& m : models) {
        for (double q : {0.0, 1.0}) {
            auto W = build_scale(m, q);
            for (double x : {0.5, 1.0, 2.0}) {
                const double inv = invert_laplace(
                    [&](std::complex<double> s) {
                        return 1.0 / (m.laplace_exponent(s) - q);
                    },
                    x, W.phi());
                CHECK(inv == doctest::Approx(W.W(x)).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("resolvent density") {
    auto Wb = build_scale(LevyModel::brownian_drift(1.0, 1.0), 1.5);
    CHECK(resolvent_density(Wb, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
    // u_q(x)/u_q(0) = e^{-x Phi(q)} for x > 0.
    for (double x : {0.5, 1.0, 2.0}) {
        CHECK(resolvent_density(Wb, x) / resolvent_density(Wb, 0.0) ==
              doctest::Approx(std::exp(-x * Wb.phi())).epsilon(1e-10));
    }
    // CL at q=1, y=-1: Phi'(1) e^{Phi(1)} - W^{(1)}(1) = (2/15) e^{-2/3}.
    auto W1 = build_scale(cl, 1.0);
    CHECK(resolvent_density(W1, -1.0) ==
          doctest::Approx((2.0 / 15.0) * std::exp(-2.0 / 3.0)).epsilon(1e-9));
    CHECK_THROWS_AS(resolvent_density(build_scale(cl, 0.0), 1.0), DomainError);
}

TEST_CASE("occupation kernel") {
    auto W = build_scale(cl, 0.0);
    const double b = 2.0;
    CHECK(occupation_kernel(W, b, 1.0) == doctest::Approx(W.W(1.0) / W.W(2.0)).epsilon(1e-12));
    CHECK(occupation_kernel(W, b, 1.0) == doctest::Approx(0.794125).epsilon(1e-6));
    // Positive on all of (-inf, b), including the negative branch.
    for (double x : {-3.0, -0.5, 0.2, 1.9}) CHECK(occupation_kernel(W, b, x) > 0.0);
    // Unbounded variation: H(b, x) -> 0 as x -> b-.
    auto Wu = build_scale(LevyModel::brownian_drift(1.0, 1.0), 0.0);
    CHECK(occupation_kernel(Wu, b, b - 1e-9) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK_THROWS_AS(occupation_kernel(W, b, b), DomainError);
}

TEST_CASE("ruin position kernel") {
    auto W = build_scale(cl, 0.0);
    CHECK(ruin_position_kernel(W, 2.0, 1.0, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
    const double v = W.W(1.0) * W.W(1.0) / W.W(2.0) - W.W(0.0);
    CHECK(ruin_position_kernel(W, 2.0, 1.0, 1.0) == doctest::Approx(v).epsilon(1e-12));
    CHECK(ruin_position_kernel(W, 2.0, 1.0, 1.0) == doctest::Approx(0.1628937).epsilon(1e-5));
    // x = 0+ with unbounded variation: kernel vanishes for y > 0.
    auto Wu = build_scale(LevyModel::brownian_drift(1.0, 1.0), 0.0);
    CHECK(ruin_position_kernel(Wu, 2.0, 0.0, 0.7) == doctest::Approx(0.0).epsilon(1e-14));
    // Nonnegative on y in [0, a].
    for (double y = 0.0; y <= 2.0; y += 0.1)
        CHECK(ruin_position_kernel(W, 2.0, 1.3, y) >= -1e-12);
}

TEST_CASE("creep kernel and its diagonal slope") {
    auto W = build_scale(LevyModel::jump_diffusion(1.0, 1.0, 0.5, {{1.0, 1.0}}), 0.05);
    CHECK(creep_kernel(W, 1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
    // Diagonal slope against a centered finite difference of the kernel.
    const double a = 1.0, h = 1e-5;
    const double fd = (creep_kernel(W, a, a) - creep_kernel(W, a, a - 2.0 * h)) / (2.0 * h);
    CHECK(creep_kernel_slope_at_top(W, a) == doctest::Approx(fd).epsilon(1e-4));
    // Second derivative is guarded for bounded variation at 0.
    auto Wb = build_scale(cl, 0.0);
    CHECK_THROWS_AS(Wb.W_second(0.0), DomainError);
    CHECK_THROWS_AS(creep_kernel_slope_at_top(Wb, 1.0), DomainError);
}

TEST_CASE("build_scale rejects negative q") {
    CHECK_THROWS_AS(build_scale(cl, -0.1), DomainError);
}

TEST_CASE("kernel context wires a scale pair to one barrier") {
    auto Wq = build_scale(cl, 0.05);
    auto Wql = build_scale(cl, 1.05);
    KernelContext ctx{&Wq, &Wql, 2.0};
    ctx.validate();
    CHECK(occupation_kernel(ctx, 1.0) ==
          doctest::Approx(occupation_kernel(Wq, 2.0, 1.0)).epsilon(1e-14));
    KernelContext bad{&Wq, &Wql, -1.0};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    KernelContext swapped{&Wql, &Wq, 2.0};
    CHECK_THROWS_AS(swapped.validate(), ValidationError);
}
