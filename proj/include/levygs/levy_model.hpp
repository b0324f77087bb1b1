#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "levygs/errors.hpp"
#include "levygs/numerics.hpp"

namespace levygs {

enum class LevyKind { CramerLundberg, BrownianDrift, JumpDiffusion };

enum class VariationClass { Bounded, Unbounded };

struct ClaimComponent {
    double weight;
    double rate;
};

// Spectrally negative Levy surplus process X_t = drift*t + sigma*B_t - S_t,
// where S is a compound Poisson sum of mixed-exponential claims. The Laplace
// exponent is
//
//   psi(u) = drift*u + sigma^2 u^2 / 2 + jump_rate * sum_i w_i (mu_i/(mu_i+u) - 1),
//
// which is rational in u, so q-scale functions have exact exponential-sum
// representations. Claims are restricted to finite mixtures of exponentials
// with distinct rates; these keep psi rational while being dense enough to
// approximate general claim laws.
struct LevyModel {
    LevyKind kind = LevyKind::CramerLundberg;
    double drift = 0.0;      // premium rate c when sigma = 0, linear coefficient otherwise
    double sigma = 0.0;      // Gaussian coefficient
    double jump_rate = 0.0;  // Poisson claim arrival rate
    std::vector<ClaimComponent> claims;  // weights sum to 1, rates positive and distinct

    static LevyModel cramer_lundberg(double premium_rate, double jump_rate,
                                     std::vector<ClaimComponent> claims) {
        LevyModel m{LevyKind::CramerLundberg, premium_rate, 0.0, jump_rate, std::move(claims)};
        m.validate();
        return m;
    }

    static LevyModel brownian_drift(double drift, double sigma) {
        LevyModel m{LevyKind::BrownianDrift, drift, sigma, 0.0, {}};
        m.validate();
        return m;
    }

    static LevyModel jump_diffusion(double drift, double sigma, double jump_rate,
                                    std::vector<ClaimComponent> claims) {
        LevyModel m{LevyKind::JumpDiffusion, drift, sigma, jump_rate, std::move(claims)};
        m.validate();
        return m;
    }

    bool has_jumps() const { return jump_rate > 0.0 && !claims.empty(); }

    double laplace_exponent(double u) const {
        double v = drift * u + 0.5 * sigma * sigma * u * u;
        for (const auto& c : claims)
            v += jump_rate * c.weight * (c.rate / (c.rate + u) - 1.0);
        return v;
    }

    // Analytic continuation off the real axis, used by the inversion oracle.
    std::complex<double> laplace_exponent(std::complex<double> u) const {
        std::complex<double> v = drift * u + 0.5 * sigma * sigma * u * u;
        for (const auto& c : claims)
            v += jump_rate * c.weight * (c.rate / (c.rate + u) - 1.0);
        return v;
    }

    double psi_prime(double u) const {
        double v = drift + sigma * sigma * u;
        for (const auto& c : claims) {
            const double d = c.rate + u;
            v -= jump_rate * c.weight * c.rate / (d * d);
        }
        return v;
    }

    double psi_second(double u) const {
        double v = sigma * sigma;
        for (const auto& c : claims) {
            const double d = c.rate + u;
            v += 2.0 * jump_rate * c.weight * c.rate / (d * d * d);
        }
        return v;
    }

    // psi'(0+) = drift - jump_rate * E[claim]; positive under the net profit
    // condition.
    double psi_prime_at_zero() const { return psi_prime(0.0); }

    double claim_mean() const {
        double m = 0.0;
        for (const auto& c : claims) m += c.weight / c.rate;
        return m;
    }

    // Levy measure of (-inf, -z): total rate of claims larger than z.
    double levy_tail(double z) const {
        double v = 0.0;
        for (const auto& c : claims) v += jump_rate * c.weight * std::exp(-c.rate * z);
        return v;
    }

    // Density of the claim-size law scaled by jump_rate, evaluated at s > 0:
    // Pi(du) restricted to u = -s.
    double jump_density(double s) const {
        double v = 0.0;
        for (const auto& c : claims) v += jump_rate * c.weight * c.rate * std::exp(-c.rate * s);
        return v;
    }

    VariationClass variation_class() const {
        return sigma == 0.0 ? VariationClass::Bounded : VariationClass::Unbounded;
    }

    // Structural checks only; admissibility (net profit) is a separate gate so
    // unit tests can build boundary models.
    void validate_structure() const {
        if (sigma < 0.0) throw ValidationError("sigma must be nonnegative");
        if (jump_rate < 0.0) throw ValidationError("jump_rate must be nonnegative");
        switch (kind) {
            case LevyKind::CramerLundberg:
                if (sigma != 0.0) throw ValidationError("CramerLundberg requires sigma = 0");
                if (!(drift > 0.0))
                    throw ValidationError("CramerLundberg requires premium rate c > 0");
                if (!(jump_rate > 0.0) || claims.empty())
                    throw ValidationError("CramerLundberg requires claims (monotone paths excluded)");
                break;
            case LevyKind::BrownianDrift:
                if (!(sigma > 0.0)) throw ValidationError("BrownianDrift requires sigma > 0");
                if (jump_rate != 0.0 || !claims.empty())
                    throw ValidationError("BrownianDrift admits no jumps");
                break;
            case LevyKind::JumpDiffusion:
                if (!(sigma > 0.0)) throw ValidationError("JumpDiffusion requires sigma > 0");
                if (!(jump_rate > 0.0) || claims.empty())
                    throw ValidationError("JumpDiffusion requires claims");
                break;
        }
        double wsum = 0.0;
        for (std::size_t i = 0; i < claims.size(); ++i) {
            if (!(claims[i].weight > 0.0))
                throw ValidationError("claim weights must be positive");
            if (!(claims[i].rate > 0.0))
                throw ValidationError("claim rates must be positive");
            wsum += claims[i].weight;
            for (std::size_t j = 0; j < i; ++j)
                if (std::fabs(claims[i].rate - claims[j].rate) <=
                    1e-9 * std::max(claims[i].rate, claims[j].rate))
                    throw ValidationError("claim rates must be distinct; merge equal components");
        }
        if (!claims.empty() && std::fabs(wsum - 1.0) > 1e-9)
            throw ValidationError("claim weights must sum to 1");
        if (std::fabs(laplace_exponent(0.0)) > 1e-12)
            throw ValidationError("psi(0) = 0 violated");
    }

    void validate() const {
        validate_structure();
        if (!(psi_prime_at_zero() > 0.0))
            throw ValidationError("net profit condition psi'(0+) > 0 violated");
    }
};

inline const char* to_string(LevyKind k) {
    switch (k) {
        case LevyKind::CramerLundberg: return "cramer_lundberg";
        case LevyKind::BrownianDrift: return "brownian_drift";
        case LevyKind::JumpDiffusion: return "jump_diffusion";
    }
    return "?";
}

// Integral of g against the jump measure over (-inf, -z_lo), z_lo >= 0.
// g receives the (negative) jump position u; truncation point comes from the
// Levy tail envelope.
template <class G>
double integrate_jump_tail(const LevyModel& m, G&& g, double z_lo,
                           const QuadratureConfig& cfg, double* err_out = nullptr) {
    if (!m.has_jumps()) {
        if (err_out) *err_out = 0.0;
        return 0.0;
    }
    return integrate_upper([&](double s) { return g(-s) * m.jump_density(s); }, z_lo,
                           [&](double T) { return m.levy_tail(T); }, cfg, err_out);
}

// Integral of g against the jump measure over the finite interval (lo, hi),
// with lo < hi <= 0.
template <class G>
double integrate_jump_interval(const LevyModel& m, G&& g, double lo, double hi,
                               const QuadratureConfig& cfg, double* err_out = nullptr) {
    if (!m.has_jumps() || !(hi > lo)) {
        if (err_out) *err_out = 0.0;
        return 0.0;
    }
    return integrate([&](double s) { return g(-s) * m.jump_density(s); }, -hi, -lo, cfg,
                     err_out);
}

} // namespace levygs
