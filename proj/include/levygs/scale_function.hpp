#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "levygs/errors.hpp"
#include "levygs/levy_model.hpp"
#include "levygs/numerics.hpp"

namespace levygs {

// One term coef * x^power * exp(root*x) of the exponential-sum representation.
struct ScaleTerm {
    double coef;
    double root;
    int power;  // 0, or 1 for a double root
};

namespace detail {

// psi(u) - q is rational; multiplying by prod_i (mu_i + u) gives a polynomial
// whose real roots interlace the poles -mu_i. Every root is isolated by a
// certified sign bracket, so the factorization needs no general polynomial
// machinery:
//   - rightmost interval (-mu_min, inf): psi is strictly convex there, two
//     roots split by the minimizer (the larger one is Phi(q)),
//   - each interval between consecutive poles holds exactly one root,
//   - with sigma > 0 one more root lies left of the last pole.
// Degree counting shows this exhausts the root set, so all roots are real
// and simple for admissible models.
inline std::vector<double> isolate_scale_roots(const LevyModel& m, double q) {
    auto g = [&](double u) { return m.laplace_exponent(u) - q; };
    auto gp = [&](double u) { return m.psi_prime(u); };

    std::vector<double> mus;
    for (const auto& c : m.claims) mus.push_back(c.rate);
    std::sort(mus.begin(), mus.end());
    const std::size_t nm = mus.size();

    // Nudge off a pole until the expected sign shows up.
    auto nudge = [&](double pole, double toward, auto&& fn, bool want_positive) {
        double delta = std::fabs(toward - pole) * 1e-6;
        for (int i = 0; i < 40; ++i) {
            const double x = pole + (toward > pole ? delta : -delta);
            const double v = fn(x);
            if (want_positive ? (v > 0.0) : (v < 0.0)) return x;
            delta *= 0.01;
            if (delta < std::fabs(pole) * 1e-300 + 1e-300) break;
        }
        throw RootIsolationFailure("scale roots: sign pattern not found near pole");
    };

    std::vector<double> roots;

    // Rightmost interval (-mu_min, inf).
    const double mu1 = mus.front();
    const double left_edge = nudge(-mu1, 0.0, gp, false);  // psi' -> -inf at the pole
    double hi = 1.0;
    int guard = 0;
    while (gp(hi) <= 0.0) {
        hi *= 2.0;
        if (++guard > 200) throw RootIsolationFailure("scale roots: psi' stays negative");
    }
    const double argmin = find_root_increasing(gp, left_edge, hi, 1e-15);

    // Left branch: psi - q decreases from +inf to its minimum.
    {
        const double a = nudge(-mu1, argmin, g, true);
        if (g(argmin) < 0.0)
            roots.push_back(find_root_increasing([&](double u) { return -g(u); }, a, argmin, 1e-15));
        else
            throw RootIsolationFailure("scale roots: minimum of psi not below q");
    }
    // Right branch: Phi(q).
    if (q == 0.0) {
        roots.push_back(0.0);
    } else {
        double top = std::max(argmin + 1.0, 1.0);
        guard = 0;
        while (g(top) <= 0.0) {
            top *= 2.0;
            if (++guard > 200) throw RootIsolationFailure("scale roots: psi does not exceed q");
        }
        roots.push_back(find_root_increasing(g, argmin, top, 1e-15));
    }

    // One root strictly between each pair of consecutive poles.
    for (std::size_t i = 0; i + 1 < nm; ++i) {
        const double right_pole = -mus[i];
        const double left_pole = -mus[i + 1];
        const double a = nudge(left_pole, right_pole, g, true);
        const double b = nudge(right_pole, left_pole, g, false);
        roots.push_back(find_root_increasing([&](double u) { return -g(u); }, a, b, 1e-15));
    }

    // With a Gaussian part, one more root left of the last pole.
    if (m.sigma > 0.0) {
        const double b = nudge(-mus.back(), -mus.back() - 1.0, g, false);
        double lo = -mus.back() - 1.0;
        guard = 0;
        while (g(lo) <= 0.0) {
            lo = -mus.back() - 2.0 * (std::fabs(lo) - mus.back() + 1.0);
            if (++guard > 200) throw RootIsolationFailure("scale roots: no sign change at -inf");
        }
        roots.push_back(find_root_increasing([&](double u) { return -g(u); }, lo, b, 1e-15));
    }

    std::sort(roots.begin(), roots.end());
    return roots;
}

} // namespace detail

// Evaluable representation of the q-scale function W^(q) (and companions) for
// one (model, q) pair. W^(q) is the continuous function on [0,inf) with
// Laplace transform 1/(psi - q), extended by 0 on (-inf, 0); here it is an
// exact exponential sum with coefficients 1/psi'(r_j) at the roots r_j of
// psi = q. Immutable after build; concurrent evaluation is safe.
class ScaleFunction {
public:
    static ScaleFunction build(const LevyModel& model, double q) {
        if (q < 0.0) throw DomainError("build_scale: q must be >= 0");
        model.validate_structure();
        ScaleFunction s;
        s.model_ = model;
        s.q_ = q;

        if (!m_has_jumps(model)) {
            // Pure diffusion: psi - q = (sigma^2/2) u^2 + drift*u - q.
            const double half_s2 = 0.5 * model.sigma * model.sigma;
            const double disc = model.drift * model.drift + 4.0 * half_s2 * q;
            const double sq = std::sqrt(std::max(disc, 0.0));
            const double scale = std::max({1.0, std::fabs(model.drift), half_s2});
            if (sq <= 1e-14 * scale) {
                // Double root (q = 0 with zero drift): W(x) = (2/sigma^2) x e^{rx}.
                const double r = -model.drift / (2.0 * half_s2);
                s.terms_.push_back({1.0 / half_s2, r, 1});
                s.phi_ = r;
            } else {
                const double r_hi = (-model.drift + sq) / (2.0 * half_s2);
                const double r_lo = (-model.drift - sq) / (2.0 * half_s2);
                s.terms_.push_back({1.0 / model.psi_prime(r_hi), r_hi, 0});
                s.terms_.push_back({1.0 / model.psi_prime(r_lo), r_lo, 0});
                s.phi_ = r_hi;
            }
        } else {
            auto roots = detail::isolate_scale_roots(model, q);
            for (double r : roots) {
                const double d = model.psi_prime(r);
                if (!(std::fabs(d) > 0.0))
                    throw RootIsolationFailure("build_scale: repeated root detected");
                s.terms_.push_back({1.0 / d, r, 0});
            }
            s.phi_ = roots.back();

            // Independent check of Phi(q) by bracketed root finding on psi - q.
            if (q > 0.0) {
                double hi = 1.0;
                int guard = 0;
                while (model.laplace_exponent(hi) <= q) {
                    hi *= 2.0;
                    if (++guard > 200)
                        throw RootIsolationFailure("build_scale: Phi bracket not found");
                }
                const double phi_check = find_root_increasing(
                    [&](double u) { return model.laplace_exponent(u) - q; }, 0.0, hi, 1e-15);
                if (std::fabs(phi_check - s.phi_) > 1e-10 * std::max(1.0, std::fabs(s.phi_)))
                    throw RootIsolationFailure("build_scale: Phi(q) cross-check failed");
            }
        }

        s.check_initial_values();
        return s;
    }

    const LevyModel& model() const { return model_; }
    double q() const { return q_; }
    double phi() const { return phi_; }

    // Phi'(q) = 1/psi'(Phi(q)).
    double phi_prime() const {
        const double d = model_.psi_prime(phi_);
        if (!(d > 0.0)) throw DomainError("phi_prime: psi'(Phi(q)) not positive");
        return 1.0 / d;
    }

    double W(double x) const {
        if (x < 0.0) return 0.0;
        double v = 0.0;
        for (const auto& t : terms_)
            v += t.coef * pw(x, t.power) * std::exp(t.root * x);
        return v;
    }

    // Right-derivative at 0 for bounded variation; appears only inside
    // Lebesgue integrals there.
    double W_prime(double x) const {
        if (x < 0.0) return 0.0;
        double v = 0.0;
        for (const auto& t : terms_)
            v += t.coef * std::exp(t.root * x) *
                 (t.power * pw(x, t.power - 1) + t.root * pw(x, t.power));
        return v;
    }

    double W_second(double x) const {
        if (model_.variation_class() == VariationClass::Bounded && x <= 0.0)
            throw DomainError("W_second: undefined at 0 for bounded variation");
        if (x < 0.0) return 0.0;
        double v = 0.0;
        for (const auto& t : terms_) {
            const double p = t.power;
            v += t.coef * std::exp(t.root * x) *
                 (2.0 * p * t.root * pw(x, t.power - 1) + t.root * t.root * pw(x, t.power));
        }
        return v;
    }

    // Z^(q)(x) = 1 + q int_0^x W^(q), equal to 1 on x <= 0.
    double Z(double x) const {
        if (x <= 0.0 || q_ == 0.0) return 1.0;
        double acc = 0.0;
        for (const auto& t : terms_) {
            if (t.root == 0.0) {
                acc += t.coef * (t.power == 0 ? x : 0.5 * x * x);
            } else if (t.power == 0) {
                acc += t.coef * (std::exp(t.root * x) - 1.0) / t.root;
            } else {
                const double e = std::exp(t.root * x);
                acc += t.coef * (x * e / t.root - (e - 1.0) / (t.root * t.root));
            }
        }
        return 1.0 + q_ * acc;
    }

    // Analytic transform of the representation: int_0^inf e^{-lam x} W(x) dx,
    // valid for lam > Phi(q). Used to verify (psi(lam) - q) * transform = 1.
    double laplace_W(double lam) const {
        if (!(lam > phi_)) throw DomainError("laplace_W: need lam > Phi(q)");
        double v = 0.0;
        for (const auto& t : terms_) {
            const double d = lam - t.root;
            v += t.coef * (t.power == 0 ? 1.0 / d : 1.0 / (d * d));
        }
        return v;
    }

    double W_at_zero() const { return W(0.0); }

private:
    static bool m_has_jumps(const LevyModel& m) { return m.has_jumps(); }

    static double pw(double x, int p) {
        if (p <= 0) return p == 0 ? 1.0 : 0.0;
        return p == 1 ? x : std::pow(x, p);
    }

    void check_initial_values() const {
        double scale = 0.0;
        for (const auto& t : terms_) scale += std::fabs(t.coef);
        if (model_.variation_class() == VariationClass::Bounded) {
            const double expect = 1.0 / model_.drift;
            if (std::fabs(W(0.0) - expect) > 1e-8 * expect)
                throw RootIsolationFailure("build_scale: W(0+) != 1/c");
        } else {
            if (std::fabs(W(0.0)) > 1e-8 * std::max(scale, 1.0))
                throw RootIsolationFailure("build_scale: W(0+) != 0");
            const double expect = 2.0 / (model_.sigma * model_.sigma);
            if (std::fabs(W_prime(0.0) - expect) > 1e-8 * expect)
                throw RootIsolationFailure("build_scale: W'(0+) != 2/sigma^2");
        }
    }

    LevyModel model_;
    double q_ = 0.0;
    double phi_ = 0.0;
    std::vector<ScaleTerm> terms_;
};

inline ScaleFunction build_scale(const LevyModel& model, double q) {
    return ScaleFunction::build(model, q);
}

// q-resolvent density u_q(y) = Phi'(q) e^{-Phi(q) y} - W^(q)(-y), q > 0.
inline double resolvent_density(const ScaleFunction& s, double y) {
    if (!(s.q() > 0.0)) throw DomainError("resolvent_density: requires q > 0");
    return s.phi_prime() * std::exp(-s.phi() * y) - s.W(-y);
}

// Occupation-density kernel of an excursion killed at up-crossing of b:
//   (W(b-x) - e^{Phi b} W(-x)) / W(b),  x < b.
// For x in (0,b) the second summand vanishes.
inline double occupation_kernel(const ScaleFunction& s, double b, double x) {
    if (!(x < b)) throw DomainError("occupation_kernel: requires x < b");
    const double wb = s.W(b);
    double v = s.W(b - x) / wb;
    if (x < 0.0) v -= std::exp(s.phi() * b) * s.W(-x) / wb;
    return v;
}

// Density kernel of the pre-ruin position for exit of [0,a] started at x:
//   W(x) W(a-y) / W(a) - W(x-y),  0 <= x <= a.
// Nonnegative for y in [0,a]; kinked across y = x.
inline double ruin_position_kernel(const ScaleFunction& s, double a, double x, double y) {
    return s.W(x) * s.W(a - y) / s.W(a) - s.W(x - y);
}

// Creeping kernel W'(x) - W(x) W'(a) / W(a): the (sigma^2/2)-weighted density
// of hitting 0 continuously before up-crossing a, started at x in (0,a].
inline double creep_kernel(const ScaleFunction& s, double a, double x) {
    if (x < 0.0) return 0.0;
    return s.W_prime(x) - s.W(x) * s.W_prime(a) / s.W(a);
}

// d/dx of the creeping kernel on the diagonal x = a: W''(a) - W'(a)^2 / W(a).
// Needs a twice-differentiable scale function, so sigma > 0.
inline double creep_kernel_slope_at_top(const ScaleFunction& s, double a) {
    if (!(s.model().sigma > 0.0))
        throw DomainError("creep_kernel_slope_at_top: requires sigma > 0");
    const double wp = s.W_prime(a);
    return s.W_second(a) - wp * wp / s.W(a);
}

// Scale functions needed to evaluate penalty terms against one barrier:
// the level-q pair plus the shifted level q+lambda used by the creeping
// blocks, and the level-0 scale entering the excursion-length kernel.
struct KernelContext {
    const ScaleFunction* at_q = nullptr;
    const ScaleFunction* at_q_plus_lambda = nullptr;
    double barrier = 0.0;

    void validate() const {
        if (!at_q) throw ValidationError("KernelContext: missing level-q scale");
        if (!(barrier > 0.0)) throw ValidationError("KernelContext: barrier must be > 0");
        if (at_q_plus_lambda) {
            if (!(at_q_plus_lambda->q() > at_q->q()))
                throw ValidationError("KernelContext: shifted level must exceed q");
            if (at_q_plus_lambda->model().sigma != at_q->model().sigma ||
                at_q_plus_lambda->model().drift != at_q->model().drift ||
                at_q_plus_lambda->model().jump_rate != at_q->model().jump_rate)
                throw ValidationError("KernelContext: scales must share one model");
        }
    }
};

inline double occupation_kernel(const KernelContext& ctx, double x) {
    return occupation_kernel(*ctx.at_q, ctx.barrier, x);
}

} // namespace levygs
