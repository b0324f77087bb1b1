#pragma once

#include <cmath>
#include <vector>

#include "levygs/errors.hpp"
#include "levygs/numerics.hpp"
#include "levygs/rng.hpp"

namespace levygs {

enum class SeverityKind { PointMass, Exponential, MixtureOfPointMasses };

struct SeverityAtom {
    double weight;
    double value;
};

// Law of the debt-severity mark Y attached to each negative excursion.
// PointMass(0) is the classical-ruin degenerate case.
struct SeverityDistribution {
    SeverityKind kind = SeverityKind::PointMass;
    double value = 0.0;  // point mass location
    double rate = 1.0;   // exponential rate
    std::vector<SeverityAtom> atoms;

    static SeverityDistribution point_mass(double y0) {
        if (y0 < 0.0) throw ValidationError("severity point mass must be >= 0");
        SeverityDistribution d;
        d.kind = SeverityKind::PointMass;
        d.value = y0;
        return d;
    }

    static SeverityDistribution exponential(double rate) {
        if (!(rate > 0.0)) throw ValidationError("severity rate must be > 0");
        SeverityDistribution d;
        d.kind = SeverityKind::Exponential;
        d.rate = rate;
        return d;
    }

    static SeverityDistribution mixture(std::vector<SeverityAtom> atoms) {
        if (atoms.empty()) throw ValidationError("severity mixture needs atoms");
        double w = 0.0;
        for (const auto& a : atoms) {
            if (!(a.weight > 0.0)) throw ValidationError("severity weights must be > 0");
            if (a.value < 0.0) throw ValidationError("severity support must be >= 0");
            w += a.weight;
        }
        if (std::fabs(w - 1.0) > 1e-9)
            throw ValidationError("severity weights must sum to 1");
        SeverityDistribution d;
        d.kind = SeverityKind::MixtureOfPointMasses;
        d.atoms = std::move(atoms);
        return d;
    }

    bool is_discrete() const { return kind != SeverityKind::Exponential; }

    double mean() const {
        switch (kind) {
            case SeverityKind::PointMass: return value;
            case SeverityKind::Exponential: return 1.0 / rate;
            case SeverityKind::MixtureOfPointMasses: {
                double m = 0.0;
                for (const auto& a : atoms) m += a.weight * a.value;
                return m;
            }
        }
        return 0.0;
    }

    // Infimum of the support; the unbounded-variation formulas require this
    // to be strictly positive.
    double min_support() const {
        switch (kind) {
            case SeverityKind::PointMass: return value;
            case SeverityKind::Exponential: return 0.0;
            case SeverityKind::MixtureOfPointMasses: {
                double m = atoms.front().value;
                for (const auto& a : atoms) m = std::min(m, a.value);
                return m;
            }
        }
        return 0.0;
    }

    double cdf(double y) const {
        if (y < 0.0) return 0.0;
        switch (kind) {
            case SeverityKind::PointMass: return y >= value ? 1.0 : 0.0;
            case SeverityKind::Exponential: return 1.0 - std::exp(-rate * y);
            case SeverityKind::MixtureOfPointMasses: {
                double p = 0.0;
                for (const auto& a : atoms)
                    if (a.value <= y) p += a.weight;
                return p;
            }
        }
        return 0.0;
    }

    double sample(PathRng& rng) const {
        switch (kind) {
            case SeverityKind::PointMass: return value;
            case SeverityKind::Exponential: return rng.exponential(rate);
            case SeverityKind::MixtureOfPointMasses: {
                double u = rng.uniform();
                for (const auto& a : atoms) {
                    if (u <= a.weight) return a.value;
                    u -= a.weight;
                }
                return atoms.back().value;
            }
        }
        return 0.0;
    }
};

// E[g(Y)]: exact weighted sum for discrete laws, quadrature against the
// density with tail truncation otherwise.
template <class G>
double expect_over_Y(const SeverityDistribution& law, G&& g, const QuadratureConfig& cfg,
                     double* err_out = nullptr) {
    if (err_out) *err_out = 0.0;
    switch (law.kind) {
        case SeverityKind::PointMass:
            return g(law.value);
        case SeverityKind::MixtureOfPointMasses: {
            double v = 0.0;
            for (const auto& a : law.atoms) v += a.weight * g(a.value);
            return v;
        }
        case SeverityKind::Exponential: {
            const double T = -std::log(cfg.tail_cut_mass) / law.rate;
            return integrate([&](double y) { return g(y) * law.rate * std::exp(-law.rate * y); },
                             0.0, T, cfg, err_out);
        }
    }
    return 0.0;
}

// Exponential clock attached to each excursion; bankruptcy by creeping
// requires the excursion to outlive it.
struct CreepClock {
    double lambda = 1.0;

    static CreepClock with_rate(double lambda) {
        if (!(lambda > 0.0)) throw ValidationError("creep clock rate must be > 0");
        return CreepClock{lambda};
    }
};

} // namespace levygs
