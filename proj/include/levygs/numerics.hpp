#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "levygs/errors.hpp"

namespace levygs {

struct QuadratureConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_subdivisions = 2000;
    // Truncation threshold for improper integrals: the upper limit is pushed
    // out until the caller-supplied envelope mass beyond it drops below this.
    double tail_cut_mass = 1e-12;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(tail_cut_mass > 0.0))
            throw ValidationError("quadrature tolerances must be strictly positive");
        if (max_subdivisions < 1)
            throw ValidationError("max_subdivisions must be >= 1");
    }
};

namespace detail {

// Gauss-Kronrod 15(7) nodes and weights on [-1,1].
inline constexpr double gk15_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double gk15_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double gk15_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
    double value;
    double error;
    double resabs;
};

// One GK15 evaluation on [a,b] with the QUADPACK-style error estimate.
template <class F>
PanelResult gk15(F&& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double fv1[7], fv2[7];
    const double fc = f(center);
    double resg = fc * gk15_wg[3];
    double resk = fc * gk15_wk[7];
    double resabs = std::fabs(resk);

    for (int j = 0; j < 3; ++j) {
        const int jtw = 2 * j + 1;
        const double absc = half * gk15_x[jtw];
        fv1[jtw] = f(center - absc);
        fv2[jtw] = f(center + absc);
        const double fsum = fv1[jtw] + fv2[jtw];
        resg += gk15_wg[j] * fsum;
        resk += gk15_wk[jtw] * fsum;
        resabs += gk15_wk[jtw] * (std::fabs(fv1[jtw]) + std::fabs(fv2[jtw]));
    }
    for (int j = 0; j < 4; ++j) {
        const int jtwm1 = 2 * j;
        const double absc = half * gk15_x[jtwm1];
        fv1[jtwm1] = f(center - absc);
        fv2[jtwm1] = f(center + absc);
        const double fsum = fv1[jtwm1] + fv2[jtwm1];
        resk += gk15_wk[jtwm1] * fsum;
        resabs += gk15_wk[jtwm1] * (std::fabs(fv1[jtwm1]) + std::fabs(fv2[jtwm1]));
    }

    const double reskh = resk * 0.5;
    double resasc = gk15_wk[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += gk15_wk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));

    const double value = resk * half;
    resabs *= std::fabs(half);
    resasc *= std::fabs(half);
    double err = std::fabs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / eps50)
        err = std::max(err, eps50 * resabs);
    return {value, err, resabs};
}

struct Panel {
    double a, b, value, error;
    bool at_round_off;  // error estimate is pinned to the round-off floor
    bool operator<(const Panel& o) const { return error < o.error; }
};

inline bool round_off_limited(const PanelResult& r) {
    return r.error <= 200.0 * std::numeric_limits<double>::epsilon() * r.resabs;
}

} // namespace detail

struct IntegralEstimate {
    double value = 0.0;
    double error = 0.0;
};

// Globally adaptive GK15 over a union of panels. `breaks` must be an
// increasing sequence; use interior breakpoints to isolate integrand kinks so
// every panel sees a smooth piece. Throws NoConvergence when the subdivision
// budget runs out before the tolerance is met.
template <class F>
IntegralEstimate integrate_segmented(F&& f, const std::vector<double>& breaks,
                                     const QuadratureConfig& cfg) {
    if (breaks.size() < 2) return {0.0, 0.0};
    std::priority_queue<detail::Panel> heap;
    double total = 0.0, total_err = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1];
        if (!(b > a)) continue;
        auto r = detail::gk15(f, a, b);
        heap.push({a, b, r.value, r.error, detail::round_off_limited(r)});
        total += r.value;
        total_err += r.error;
    }
    int splits = 0;
    double err_at_last_check = std::numeric_limits<double>::max();
    while (!heap.empty()) {
        const double target = std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total));
        if (total_err <= target) break;
        // Splitting cannot improve a panel whose estimate sits at the
        // round-off floor; once the worst panel is such, the achieved error
        // is simply reported.
        if (heap.top().at_round_off) break;
        // Smooth panels gain decimal digits per split; when 64 splits move
        // the total error by under 1% the estimates are tracking evaluation
        // noise, and the achieved error is reported instead of chased.
        if (splits % 64 == 0) {
            if (total_err > 0.99 * err_at_last_check) break;
            err_at_last_check = total_err;
        }
        if (splits >= cfg.max_subdivisions)
            throw NoConvergence("integrate: subdivision budget exhausted, error " +
                                std::to_string(total_err) + " > target " +
                                std::to_string(target));
        detail::Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Interval at machine resolution; keep its estimate as-is.
            continue;
        }
        auto lo = detail::gk15(f, worst.a, mid);
        auto hi = detail::gk15(f, mid, worst.b);
        total += lo.value + hi.value - worst.value;
        total_err += lo.error + hi.error - worst.error;
        heap.push({worst.a, mid, lo.value, lo.error, detail::round_off_limited(lo)});
        heap.push({mid, worst.b, hi.value, hi.error, detail::round_off_limited(hi)});
        ++splits;
    }
    return {total, total_err};
}

template <class F>
double integrate(F&& f, double a, double b, const QuadratureConfig& cfg,
                 double* err_out = nullptr) {
    auto r = integrate_segmented(f, std::vector<double>{a, b}, cfg);
    if (err_out) *err_out = r.error;
    return r.value;
}

// Integral over [a, b] with interior kink points; points outside (a,b) are
// dropped, duplicates merged.
template <class F>
double integrate_with_breaks(F&& f, double a, double b, std::vector<double> kinks,
                             const QuadratureConfig& cfg, double* err_out = nullptr) {
    std::vector<double> pts{a, b};
    for (double k : kinks)
        if (k > a && k < b) pts.push_back(k);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto r = integrate_segmented(f, pts, cfg);
    if (err_out) *err_out = r.error;
    return r.value;
}

// Integral over [a, +inf). `tail_mass(T)` must bound the absolute mass of the
// integrand beyond T; the domain is truncated once it drops below
// cfg.tail_cut_mass. The envelope is the caller's responsibility (for
// jump-measure integrals it is the Levy tail).
template <class F, class Tail>
double integrate_upper(F&& f, double a, Tail&& tail_mass, const QuadratureConfig& cfg,
                       double* err_out = nullptr) {
    double span = 1.0;
    double T = a + span;
    int guard = 0;
    while (tail_mass(T) > cfg.tail_cut_mass) {
        span *= 2.0;
        T = a + span;
        if (++guard > 200)
            throw NoConvergence("integrate_upper: envelope tail does not reach cutoff");
    }
    // Split geometrically so the adaptive pass starts with sane panels on a
    // possibly wide domain.
    std::vector<double> pts;
    pts.push_back(a);
    double step = std::min(1.0, (T - a) * 0.5);
    double x = a + step;
    while (x < T) {
        pts.push_back(x);
        step *= 2.0;
        x += step;
    }
    pts.push_back(T);
    auto r = integrate_segmented(f, pts, cfg);
    if (err_out) *err_out = r.error;
    return r.value;
}

// Brent root bracketing for a continuous increasing function with
// f(lo) <= 0 <= f(hi). Returns x with bracket width <= tol.
template <class F>
double find_root_increasing(F&& f, double lo, double hi, double tol = 1e-13) {
    double fa = f(lo), fb = f(hi);
    if (fa > 0.0 || fb < 0.0)
        throw BracketInvalid("find_root_increasing: f(lo) <= 0 <= f(hi) violated");
    if (fa == 0.0) return lo;
    if (fb == 0.0) return hi;
    double a = lo, b = hi, c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < 200; ++iter) {
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            e = d = b - a;
        }
    }
    return b;
}

} // namespace levygs
