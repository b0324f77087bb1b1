#pragma once

#include <cmath>
#include <map>
#include <string>

#include "levygs/errors.hpp"
#include "levygs/levy_model.hpp"
#include "levygs/numerics.hpp"
#include "levygs/penalty.hpp"
#include "levygs/scale_function.hpp"
#include "levygs/severity.hpp"

namespace levygs {

struct GsOptions {
    QuadratureConfig quad;
    // The excursion-length block J pairs shifted occupation kernels with a
    // creeping kernel at level 0. Setting this evaluates that creeping factor
    // at level q instead, for sensitivity analysis only.
    bool j_kernel_at_q = false;
};

struct GerberShiuResult {
    double value = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    double quad_error = 0.0;
    std::map<std::string, double> terms;
};

namespace detail {

inline void acc(double* sink, double v) {
    if (sink) *sink += v;
}

// Kernels that difference scale-function values at level Y (the ruin-position
// and creeping kernels) lose every significant digit once e^{Phi(q) Y}
// reaches 1/epsilon: the true kernel is the exponentially small remainder of
// that cancellation. Exponential-mark expectations over such kernels are
// truncated where the evaluation stops being meaningful; the dropped mass is
// folded into the error report. Ratio- and tail-only integrands are
// cancellation-free and stay untruncated. Phi(q) * Y <= 14 keeps the
// per-evaluation noise eps * e^{Phi Y} under ~1e-10, inside the nested
// absolute tolerances.
inline double mark_eval_cap(const ScaleFunction& s) {
    const double phi = s.phi();
    return phi > 1e-12 ? 14.0 / phi : std::numeric_limits<double>::infinity();
}

template <class G>
double expect_marks(const SeverityDistribution& law, G&& g, const QuadratureConfig& cfg,
                    double y_cap, double* err_out) {
    if (law.kind == SeverityKind::Exponential) {
        const double t_mass = -std::log(cfg.tail_cut_mass) / law.rate;
        const double T = std::min(t_mass, y_cap);
        if (T < t_mass) acc(err_out, std::exp(-law.rate * T));
        double e = 0.0;
        const double v = integrate(
            [&](double y) { return g(y) * law.rate * std::exp(-law.rate * y); }, 0.0, T,
            cfg, &e);
        acc(err_out, e);
        return v;
    }
    return expect_over_Y(law, g, cfg, err_out);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Building blocks. Each evaluator integrates its display as written, with
// the jump-measure level innermost and explicit panel splits at the kink
// lines of the ruin-position kernel. `err_out`, when given, accumulates the
// outermost quadrature error estimate.
// ---------------------------------------------------------------------------

// Penalty collected when the surplus jumps straight past the mark:
//   E[ int_0^b H(b,y) int_{(-inf,-y-Y)} f(y, u+y) Pi(du) dy ].
inline double term_A(const ScaleFunction& Wq, double b, const PenaltySpec& f,
                     const SeverityDistribution& Y_law, const GsOptions& opt,
                     double* err_out = nullptr) {
    const LevyModel& m = Wq.model();
    if (!m.has_jumps()) return 0.0;
    double e_y = 0.0;
    const double v = expect_over_Y(
        Y_law,
        [&](double Y) {
            double e_outer = 0.0;
            const double r = integrate(
                [&](double y) {
                    const double H = Wq.W(b - y) / Wq.W(b);
                    return H * integrate_jump_tail(
                                   m, [&](double u) { return f(y, u + y); }, y + Y, opt.quad);
                },
                0.0, b, opt.quad, &e_outer);
            detail::acc(&e_y, e_outer);
            return r;
        },
        opt.quad, err_out);
    detail::acc(err_out, e_y);
    return v;
}

// Penalty collected when the surplus jumps into (-Y, 0) and later exits the
// excursion through a second jump below the mark:
//   E[ int_0^b H(b,y) int_{(-y-Y,-y)} int_0^Y int_{(-inf,-z)}
//        f(z-Y, u+z-Y) Wcal(Y, y+x+Y, z) Pi(du) dz Pi(dx) dy ].
inline double term_B(const ScaleFunction& Wq, double b, const PenaltySpec& f,
                     const SeverityDistribution& Y_law, const GsOptions& opt,
                     double* err_out = nullptr) {
    const LevyModel& m = Wq.model();
    if (!m.has_jumps()) return 0.0;
    double e_y = 0.0;
    const double v = detail::expect_marks(
        Y_law,
        [&](double Y) {
            if (!(Y > 0.0)) return 0.0;
            double e_outer = 0.0;
            const double r = integrate(
                [&](double y) {
                    const double H = Wq.W(b - y) / Wq.W(b);
                    const double inner = integrate_jump_interval(
                        m,
                        [&](double x) {
                            const double start = y + x + Y;  // in (0, Y)
                            return integrate_with_breaks(
                                [&](double z) {
                                    const double K = ruin_position_kernel(Wq, Y, start, z);
                                    return K * integrate_jump_tail(
                                                   m,
                                                   [&](double u) { return f(z - Y, u + z - Y); },
                                                   z, opt.quad);
                                },
                                0.0, Y, {start}, opt.quad);
                        },
                        -y - Y, -y, opt.quad);
                    return H * inner;
                },
                0.0, b, opt.quad, &e_outer);
            detail::acc(&e_y, e_outer);
            return r;
        },
        opt.quad, detail::mark_eval_cap(Wq), err_out);
    detail::acc(err_out, e_y);
    return v;
}

// Expected recovery weight of one confined excursion, subtracted from
// 1/W(0+): the bounded-variation denominator
//   1/W(0+) - E[ int_0^b H(b,y) int_{(-y-Y,-y)} W(y+x+Y)/W(Y) Pi(dx) dy ].
// The occupation kernel vanishes beyond b, so the half-line integral reduces
// to (0,b). Value lies in (0, 1/W(0+)].
inline double denominator_bv(const ScaleFunction& Wq, double b,
                             const SeverityDistribution& Y_law, const GsOptions& opt,
                             double* err_out = nullptr) {
    const LevyModel& m = Wq.model();
    if (m.variation_class() != VariationClass::Bounded)
        throw DomainError("denominator_bv: bounded-variation models only");
    double e_y = 0.0;
    const double recovery = expect_over_Y(
        Y_law,
        [&](double Y) {
            if (!(Y > 0.0)) return 0.0;
            double e_outer = 0.0;
            const double r = integrate(
                [&](double y) {
                    const double H = Wq.W(b - y) / Wq.W(b);
                    return H * integrate_jump_interval(
                                   m, [&](double x) { return Wq.W(y + x + Y) / Wq.W(Y); },
                                   -y - Y, -y, opt.quad);
                },
                0.0, b, opt.quad, &e_outer);
            detail::acc(&e_y, e_outer);
            return r;
        },
        opt.quad, err_out);
    detail::acc(err_out, e_y);
    const double den = 1.0 / Wq.W(0.0) - recovery;
    if (!(den > 0.0))
        throw DenominatorNonPositive("denominator_bv: nonpositive value " +
                                     std::to_string(den));
    return den;
}

// Discounted mass of excursions ending by a jump straight past the mark:
//   E[ int_0^b H(b,x) int_{(-inf,-x-Y)} e^{Phi(q)(x+y)} Pi(dy) dx ].
inline double term_D(const ScaleFunction& Wq, double b, const SeverityDistribution& Y_law,
                     const GsOptions& opt, double* err_out = nullptr) {
    const LevyModel& m = Wq.model();
    if (!m.has_jumps()) return 0.0;
    const double phi = Wq.phi();
    double e_y = 0.0;
    const double v = expect_over_Y(
        Y_law,
        [&](double Y) {
            double e_outer = 0.0;
            const double r = integrate(
                [&](double x) {
                    const double H = Wq.W(b - x) / Wq.W(b);
                    return H * integrate_jump_tail(
                                   m, [&](double y) { return std::exp(phi * (x + y)); },
                                   x + Y, opt.quad);
                },
                0.0, b, opt.quad, &e_outer);
            detail::acc(&e_y, e_outer);
            return r;
        },
        opt.quad, err_out);
    detail::acc(err_out, e_y);
    return v;
}

// Discounted mass of excursions that jump into (-Y,0) and end defective:
//   E[ int_0^b H(b,x) int_{(-x-Y,-x)}
//        (e^{Phi(q)(x+y)} - W(x+y+Y)/W(Y)) Pi(dy) dx ].
inline double term_E(const ScaleFunction& Wq, double b, const SeverityDistribution& Y_law,
                     const GsOptions& opt, double* err_out = nullptr) {
    const LevyModel& m = Wq.model();
    if (!m.has_jumps()) return 0.0;
    const double phi = Wq.phi();
    double e_y = 0.0;
    const double v = expect_over_Y(
        Y_law,
        [&](double Y) {
            if (!(Y > 0.0)) return 0.0;
            double e_outer = 0.0;
            const double r = integrate(
                [&](double x) {
                    const double H = Wq.W(b - x) / Wq.W(b);
                    return H * integrate_jump_interval(
                                   m,
                                   [&](double y) {
                                       return std::exp(phi * (x + y)) -
                                              Wq.W(x + y + Y) / Wq.W(Y);
                                   },
                                   -x - Y, -x, opt.quad);
                },
                0.0, b, opt.quad, &e_outer);
            detail::acc(&e_y, e_outer);
            return r;
        },
        opt.quad, err_out);
    detail::acc(err_out, e_y);
    return v;
}

// Discounted mass of immediately-negative excursions that pass the mark:
//   -(sigma^2/2) E[ e^{-Phi(q)Y} dO/dx(Y,Y) ]
//   + E[ int_0^Y int_{(-inf,-y)} e^{Phi(q)(y+z-Y)} O(Y, Y-y) Pi(dz) dy ].
inline double term_F(const ScaleFunction& Wq, const SeverityDistribution& Y_law,
                     const GsOptions& opt, double* err_out = nullptr) {
    const LevyModel& m = Wq.model();
    if (!(Y_law.min_support() > 0.0))
        throw ValidationError("term_F: severity support must be bounded away from 0");
    const double phi = Wq.phi();
    const double half_s2 = 0.5 * m.sigma * m.sigma;
    const double cap = detail::mark_eval_cap(Wq);
    const double creep_part = detail::expect_marks(
        Y_law,
        [&](double Y) {
            return std::exp(-phi * Y) * creep_kernel_slope_at_top(Wq, Y);
        },
        opt.quad, cap, err_out);
    double e_y = 0.0;
    const double jump_part =
        !m.has_jumps() ? 0.0
                       : detail::expect_marks(
                             Y_law,
                             [&](double Y) {
                                 double e_outer = 0.0;
                                 const double r = integrate(
                                     [&](double y) {
                                         const double O = creep_kernel(Wq, Y, Y - y);
                                         return O * integrate_jump_tail(
                                                        m,
                                                        [&](double z) {
                                                            return std::exp(phi * (y + z - Y));
                                                        },
                                                        y, opt.quad);
                                     },
                                     0.0, Y, opt.quad, &e_outer);
                                 detail::acc(&e_y, e_outer);
                                 return r;
                             },
                             opt.quad, cap, err_out);
    detail::acc(err_out, e_y);
    return -half_s2 * creep_part + jump_part;
}

// Penalty analogue of term_F for immediately-negative excursions:
//   -(sigma^2/2) E[ f(-Y,-Y) dO/dx(Y,Y) ]
//   + E[ int_0^Y int_{(-inf,-y)} f(y-Y, y+z-Y) O(Y, Y-y) Pi(dz) dy ].
inline double term_C(const ScaleFunction& Wq, const PenaltySpec& f,
                     const SeverityDistribution& Y_law, const GsOptions& opt,
                     double* err_out = nullptr) {
    const LevyModel& m = Wq.model();
    if (!(Y_law.min_support() > 0.0))
        throw ValidationError("term_C: severity support must be bounded away from 0");
    const double half_s2 = 0.5 * m.sigma * m.sigma;
    const double cap = detail::mark_eval_cap(Wq);
    const double creep_part = detail::expect_marks(
        Y_law,
        [&](double Y) { return f(-Y, -Y) * creep_kernel_slope_at_top(Wq, Y); },
        opt.quad, cap, err_out);
    double e_y = 0.0;
    const double jump_part =
        !m.has_jumps() ? 0.0
                       : detail::expect_marks(
                             Y_law,
                             [&](double Y) {
                                 double e_outer = 0.0;
                                 const double r = integrate(
                                     [&](double y) {
                                         const double O = creep_kernel(Wq, Y, Y - y);
                                         return O * integrate_jump_tail(
                                                        m,
                                                        [&](double z) {
                                                            return f(y - Y, y + z - Y);
                                                        },
                                                        y, opt.quad);
                                     },
                                     0.0, Y, opt.quad, &e_outer);
                                 detail::acc(&e_y, e_outer);
                                 return r;
                             },
                             opt.quad, cap, err_out);
    detail::acc(err_out, e_y);
    return -half_s2 * creep_part + jump_part;
}

// Length-of-excursion block entering both sides of the unbounded-variation
// ratio:
//   int_{-inf}^b ((lam+q) H^{(lam+q)}(b,y) - q H^{(q)}(b,y)) O(b,y) dy.
// The creeping kernel vanishes identically on y <= 0 (W and W' are zero
// there), so the effective domain is (0,b).
inline double term_J(const ScaleFunction& Wq, const ScaleFunction& Wql,
                     const ScaleFunction& creep_scale, double lambda, double b,
                     const GsOptions& opt, double* err_out = nullptr) {
    const double q = Wq.q();
    return integrate(
        [&](double y) {
            const double Hq = Wq.W(b - y) / Wq.W(b);
            const double Hql = Wql.W(b - y) / Wql.W(b);
            return ((lambda + q) * Hql - q * Hq) * creep_kernel(creep_scale, b, y);
        },
        0.0, b, opt.quad, err_out);
}

// Penalty collected when an excursion jumps into (-Y,0) and then creeps
// through the mark:
//   E[ int_0^b H(b,x) int_{(-x-Y,-x)} O(Y, Y+x+y) f(-Y,-Y) Pi(dy) dx ].
inline double term_U(const ScaleFunction& Wq, double b, const PenaltySpec& f,
                     const SeverityDistribution& Y_law, const GsOptions& opt,
                     double* err_out = nullptr) {
    const LevyModel& m = Wq.model();
    if (!m.has_jumps()) return 0.0;
    double e_y = 0.0;
    const double v = detail::expect_marks(
        Y_law,
        [&](double Y) {
            if (!(Y > 0.0)) return 0.0;
            const double fY = f(-Y, -Y);
            double e_outer = 0.0;
            const double r = integrate(
                [&](double x) {
                    const double H = Wq.W(b - x) / Wq.W(b);
                    return H * integrate_jump_interval(
                                   m,
                                   [&](double y) { return creep_kernel(Wq, Y, Y + x + y) * fY; },
                                   -x - Y, -x, opt.quad);
                },
                0.0, b, opt.quad, &e_outer);
            detail::acc(&e_y, e_outer);
            return r;
        },
        opt.quad, detail::mark_eval_cap(Wq), err_out);
    detail::acc(err_out, e_y);
    return v;
}

// Defective continuation of the first excursion from x > 0: the surplus
// jumps into (-Y, 0) and then passes the mark, either by a further jump or
// (sigma > 0) by creeping through it:
//   E[ int_0^b Wcal(b,x,y) int_{(-y-Y,-y)} ( (sigma^2/2) O(Y, y+u+Y) f(-Y,-Y)
//        + int_0^Y Wcal(Y, y+u+Y, v) int_{(-inf,-v)} f(v-Y, v+w-Y) Pi(dw) dv )
//      Pi(du) dy ].
inline double term_I(const ScaleFunction& Wq, double x, double b, const PenaltySpec& f,
                     const SeverityDistribution& Y_law, const GsOptions& opt,
                     double* err_out = nullptr) {
    const LevyModel& m = Wq.model();
    if (!m.has_jumps()) return 0.0;
    const double half_s2 = 0.5 * m.sigma * m.sigma;
    double e_y = 0.0;
    const double v = detail::expect_marks(
        Y_law,
        [&](double Y) {
            if (!(Y > 0.0)) return 0.0;
            const double fY = f(-Y, -Y);
            double e_outer = 0.0;
            const double r = integrate_with_breaks(
                [&](double y) {
                    const double Kout = ruin_position_kernel(Wq, b, x, y);
                    if (Kout == 0.0) return 0.0;
                    const double inner = integrate_jump_interval(
                        m,
                        [&](double u) {
                            const double start = y + u + Y;  // in (0, Y)
                            double h = integrate_with_breaks(
                                [&](double v2) {
                                    const double K = ruin_position_kernel(Wq, Y, start, v2);
                                    return K * integrate_jump_tail(
                                                   m,
                                                   [&](double w) {
                                                       return f(v2 - Y, v2 + w - Y);
                                                   },
                                                   v2, opt.quad);
                                },
                                0.0, Y, {start}, opt.quad);
                            if (half_s2 > 0.0)
                                h += half_s2 * creep_kernel(Wq, Y, start) * fY;
                            return h;
                        },
                        -y - Y, -y, opt.quad);
                    return Kout * inner;
                },
                0.0, b, {x}, opt.quad, &e_outer);
            detail::acc(&e_y, e_outer);
            return r;
        },
        opt.quad, detail::mark_eval_cap(Wq), err_out);
    detail::acc(err_out, e_y);
    return v;
}

// Two-sided-exit expected discounted penalty f(X at ruin) g(X before ruin)
// on ruin before up-crossing b, started at x in [0, b]:
//   (sigma^2/2) f(0) g(0) O(b,x)
//   + int_0^b int_{(-inf,-y)} f(y+u) g(y) Wcal(b,x,y) Pi(du) dy.
template <class FAt, class GPre>
double classical_gs(const ScaleFunction& Wq, double x, double b, FAt&& f_at, GPre&& g_pre,
                    const GsOptions& opt, double* err_out = nullptr) {
    const LevyModel& m = Wq.model();
    if (x < 0.0 || x > b) throw DomainError("classical_gs: need 0 <= x <= b");
    double v = 0.0;
    if (m.sigma > 0.0)
        v += 0.5 * m.sigma * m.sigma * f_at(0.0) * g_pre(0.0) * creep_kernel(Wq, b, x);
    if (m.has_jumps()) {
        v += integrate_with_breaks(
            [&](double y) {
                const double K = ruin_position_kernel(Wq, b, x, y);
                if (K == 0.0) return 0.0;
                return K * g_pre(y) *
                       integrate_jump_tail(m, [&](double u) { return f_at(y + u); }, y,
                                           opt.quad);
            },
            0.0, b, {x}, opt.quad, err_out);
    }
    return v;
}

inline double classical_gs(const ScaleFunction& Wq, double x, double b,
                           const PenaltySpec& f, const GsOptions& opt,
                           double* err_out = nullptr) {
    return classical_gs(
        Wq, x, b, [&](double at) { return f.factor_at(at); },
        [&](double pre) { return f.factor_pre(pre); }, opt, err_out);
}

// ---------------------------------------------------------------------------
// Assembled penalty values at zero initial surplus.
// ---------------------------------------------------------------------------

inline void check_value_range(double value, double sup_f) {
    if (!(value >= -1e-8) || !(value <= sup_f + 1e-8))
        throw NumericalInstability("gerber-shiu value " + std::to_string(value) +
                                   " outside [0, sup f]");
}

inline GerberShiuResult phi0_bounded_variation(const LevyModel& model, double q, double b,
                                               const PenaltySpec& f,
                                               const SeverityDistribution& Y_law,
                                               const GsOptions& opt) {
    if (model.variation_class() != VariationClass::Bounded)
        throw DomainError("phi0_bounded_variation: bounded-variation models only");
    if (!(b > 0.0)) throw ValidationError("barrier b must be > 0");
    const ScaleFunction Wq = build_scale(model, q);

    GerberShiuResult r;
    double err = 0.0;
    const double A = term_A(Wq, b, f, Y_law, opt, &err);
    const double B = term_B(Wq, b, f, Y_law, opt, &err);
    const double den = denominator_bv(Wq, b, Y_law, opt, &err);
    r.numerator = A + B;
    r.denominator = den;
    r.value = r.numerator / r.denominator;
    r.quad_error = err;
    r.terms = {{"A", A}, {"B", B}, {"C", 0.0}, {"D", 0.0}, {"E", 0.0},
               {"F", 0.0}, {"J", 0.0}, {"U", 0.0}, {"sigma_block", 0.0}};
    check_value_range(r.value, f.sup_bound(b));
    return r;
}

inline GerberShiuResult phi0_unbounded_variation(const LevyModel& model, double q, double b,
                                                 const PenaltySpec& f,
                                                 const SeverityDistribution& Y_law,
                                                 const CreepClock& clock,
                                                 const GsOptions& opt) {
    if (model.variation_class() != VariationClass::Unbounded)
        throw DomainError("phi0_unbounded_variation: unbounded-variation models only");
    if (!(b > 0.0)) throw ValidationError("barrier b must be > 0");
    if (!(Y_law.min_support() > 0.0))
        throw ValidationError(
            "phi0_unbounded_variation: severity support must be bounded away from 0 "
            "(marks arbitrarily close to 0 make bankruptcy immediate)");
    const double lambda = clock.lambda;
    const ScaleFunction Wq = build_scale(model, q);
    const ScaleFunction Wql = build_scale(model, q + lambda);
    const ScaleFunction W0 = (q == 0.0) ? Wq : build_scale(model, 0.0);
    const ScaleFunction& creep_scale = opt.j_kernel_at_q ? Wq : W0;
    const KernelContext ctx{&Wq, &Wql, b};
    ctx.validate();
    const double half_s2 = 0.5 * model.sigma * model.sigma;

    double err = 0.0;
    const double A = term_A(Wq, b, f, Y_law, opt, &err);
    const double B = term_B(Wq, b, f, Y_law, opt, &err);
    const double D = term_D(Wq, b, Y_law, opt, &err);
    const double E = term_E(Wq, b, Y_law, opt, &err);
    const double F = term_F(Wq, Y_law, opt, &err);
    const double C = term_C(Wq, f, Y_law, opt, &err);
    const double U = term_U(Wq, b, f, Y_law, opt, &err);
    const double J = term_J(Wq, Wql, creep_scale, lambda, b, opt, &err);

    GerberShiuResult r;
    r.numerator = A + B + half_s2 * (U + C + f.at_origin() * J);
    r.denominator = std::exp(Wq.phi() * b) / Wq.W(b) + D + E + half_s2 * (F + J);
    if (!(r.denominator > 0.0))
        throw DenominatorNonPositive("phi0_unbounded_variation: denominator " +
                                     std::to_string(r.denominator));
    r.value = r.numerator / r.denominator;
    r.quad_error = err;
    r.terms = {{"A", A}, {"B", B}, {"C", C}, {"D", D}, {"E", E},
               {"F", F}, {"J", J}, {"U", U},
               {"sigma_block", half_s2 * (U + C + f.at_origin() * J)}};
    check_value_range(r.value, f.sup_bound(b));
    return r;
}

inline GerberShiuResult phi0(const LevyModel& model, double q, double b,
                             const PenaltySpec& f, const SeverityDistribution& Y_law,
                             const CreepClock& clock, const GsOptions& opt) {
    return model.variation_class() == VariationClass::Bounded
               ? phi0_bounded_variation(model, q, b, f, Y_law, opt)
               : phi0_unbounded_variation(model, q, b, f, Y_law, clock, opt);
}

// ---------------------------------------------------------------------------
// Positive initial surplus: condition on how the first excursion below 0
// resolves. Direct bankruptcy channels (jump past the mark, creeping after
// the clock, defective continuation) add penalty mass; the two recovery
// channels restart the problem at 0 and multiply phi(0).
// ---------------------------------------------------------------------------

inline GerberShiuResult phi_x(const LevyModel& model, double x, double q, double b,
                              const PenaltySpec& f, const SeverityDistribution& Y_law,
                              const CreepClock& clock, const GsOptions& opt) {
    if (x < 0.0 || x > b) throw ValidationError("phi_x: need 0 <= x <= b");
    if (x == 0.0) return phi0(model, q, b, f, Y_law, clock, opt);

    const GerberShiuResult base = phi0(model, q, b, f, Y_law, clock, opt);
    const ScaleFunction Wq = build_scale(model, q);
    const double half_s2 = 0.5 * model.sigma * model.sigma;

    double err = base.quad_error;

    // Jump from the positive part straight past the mark.
    double jump_direct = 0.0;
    if (model.has_jumps()) {
        jump_direct = expect_over_Y(
            Y_law,
            [&](double Y) {
                double e_outer = 0.0;
                const double r = integrate_with_breaks(
                    [&](double y) {
                        const double K = ruin_position_kernel(Wq, b, x, y);
                        if (K == 0.0) return 0.0;
                        return K * integrate_jump_tail(
                                       Wq.model(), [&](double u) { return f(y, y + u); },
                                       y + Y, opt.quad);
                    },
                    0.0, b, {x}, opt.quad, &e_outer);
                err += e_outer;
                return r;
            },
            opt.quad, &err);
    }

    // Defective continuation after a jump into (-Y, 0).
    const double I = term_I(Wq, x, b, f, Y_law, opt, &err);

    double creep_gap = 0.0, restart_creep = 0.0;
    if (model.sigma > 0.0) {
        const ScaleFunction Wql = build_scale(model, q + clock.lambda);
        const double Oq = creep_kernel(Wq, b, x);
        const double Oql = creep_kernel(Wql, b, x);
        creep_gap = f.at_origin() * half_s2 * (Oq - Oql);
        restart_creep = half_s2 * Oql * base.value;
    }

    // Recovery through the mark interval, then a fresh start at 0.
    double recovery_weight = 0.0;
    if (model.has_jumps()) {
        recovery_weight = expect_over_Y(
            Y_law,
            [&](double Y) {
                if (!(Y > 0.0)) return 0.0;
                double e_outer = 0.0;
                const double r = integrate_with_breaks(
                    [&](double y) {
                        const double K = ruin_position_kernel(Wq, b, x, y);
                        if (K == 0.0) return 0.0;
                        return K * integrate_jump_interval(
                                       Wq.model(),
                                       [&](double u) { return Wq.W(y + u + Y) / Wq.W(Y); },
                                       -y - Y, -y, opt.quad);
                    },
                    0.0, b, {x}, opt.quad, &e_outer);
                err += e_outer;
                return r;
            },
            opt.quad, &err);
    }

    GerberShiuResult r;
    r.value = jump_direct + creep_gap + I + restart_creep + recovery_weight * base.value;
    r.denominator = base.denominator;
    r.numerator = r.value * r.denominator;
    r.quad_error = err;
    r.terms = base.terms;
    r.terms["I"] = I;
    r.terms["x_jump"] = jump_direct;
    r.terms["x_creep_gap"] = creep_gap;
    r.terms["x_recovery_weight"] = recovery_weight;
    check_value_range(r.value, f.sup_bound(b));
    return r;
}

} // namespace levygs
