#pragma once

#include <cmath>
#include <complex>

#include "levygs/errors.hpp"

namespace levygs {

namespace detail {

// Fixed-Talbot contour sum of order M for a transform G analytic in
// Re(s) > -1 (the caller shifts to arrange this).
template <class F>
double talbot_sum(F&& G, double t, int M) {
    const double r = 2.0 * M / (5.0 * t);
    double acc = 0.5 * std::exp(r * t) * std::real(G(std::complex<double>(r, 0.0)));
    for (int k = 1; k < M; ++k) {
        const double theta = k * M_PI / M;
        const double cot = std::cos(theta) / std::sin(theta);
        const std::complex<double> s(r * theta * cot, r * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        const std::complex<double> w =
            std::exp(s * t) * G(s) * std::complex<double>(1.0, sigma);
        acc += std::real(w);
    }
    return acc * r / M;
}

} // namespace detail

// Numerical inverse Laplace transform at x > 0 via the fixed-Talbot method.
// `abscissa` must lie at or right of the largest real singularity of F; the
// transform is shifted so all singularities sit left of -1 on the contour's
// scale. In double precision the contour's e^{2M/5} head term caps the usable
// order near M ~ 30: beyond that, round-off grows faster than the truncation
// error shrinks, so the lower order is the better estimate and the higher
// order serves as the stability probe.
template <class F>
double invert_laplace(F&& F_of_s, double x, double abscissa,
                      double target_rel = 1e-8) {
    if (!(x > 0.0)) throw DomainError("invert_laplace: x must be positive");
    const double shift = abscissa + 1.0;
    auto G = [&](std::complex<double> s) { return F_of_s(s + shift); };
    const double v1 = detail::talbot_sum(G, x, 28);
    const double v2 = detail::talbot_sum(G, x, 36);
    if (!std::isfinite(v1) || !std::isfinite(v2))
        throw NumericalInstability("invert_laplace: contour sum not finite");
    const double scale = std::max({std::fabs(v1), std::fabs(v2), 1e-300});
    if (std::fabs(v1 - v2) > std::max(100.0 * target_rel, 1e-6) * scale)
        throw NumericalInstability("invert_laplace: contour orders disagree beyond target");
    return std::exp(shift * x) * v1;
}

} // namespace levygs
