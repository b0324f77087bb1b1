#pragma once

#include <cmath>

#include "levygs/errors.hpp"

namespace levygs {

enum class PenaltyKind { One, ExpDeficit, ExpBoth, DeficitIndicator };

// Penalty f(x1, x2) of (surplus just before bankruptcy, surplus at
// bankruptcy). x2 <= 0 always; x1 may be positive (a jump from above) or
// negative (a jump inside the excursion), so f is exposed on all of R^2.
// Every member of the family factorizes as f(x1,x2) = pre(x1) * at(x2),
// which the classical two-sided-exit reduction relies on.
struct PenaltySpec {
    PenaltyKind kind = PenaltyKind::One;
    double theta1 = 0.0;
    double theta2 = 0.0;
    double depth = 0.0;

    static PenaltySpec one() { return {}; }

    static PenaltySpec exp_deficit(double theta2) {
        if (theta2 < 0.0) throw ValidationError("exp_deficit requires theta2 >= 0");
        return {PenaltyKind::ExpDeficit, 0.0, theta2, 0.0};
    }

    static PenaltySpec exp_both(double theta1, double theta2) {
        if (theta1 < 0.0 || theta2 < 0.0)
            throw ValidationError("exp_both requires theta1, theta2 >= 0");
        return {PenaltyKind::ExpBoth, theta1, theta2, 0.0};
    }

    static PenaltySpec deficit_indicator(double d) {
        if (!(d > 0.0)) throw ValidationError("deficit_indicator requires d > 0");
        return {PenaltyKind::DeficitIndicator, 0.0, 0.0, d};
    }

    double factor_pre(double x1) const {
        return kind == PenaltyKind::ExpBoth ? std::exp(theta1 * x1) : 1.0;
    }

    double factor_at(double x2) const {
        switch (kind) {
            case PenaltyKind::One: return 1.0;
            case PenaltyKind::ExpDeficit: return std::exp(theta2 * x2);
            case PenaltyKind::ExpBoth: return std::exp(theta2 * x2);
            case PenaltyKind::DeficitIndicator: return x2 < -depth ? 1.0 : 0.0;
        }
        return 1.0;
    }

    double operator()(double x1, double x2) const { return factor_pre(x1) * factor_at(x2); }

    double at_origin() const { return (*this)(0.0, 0.0); }

    // Bound of f over the reachable domain x1 < b, x2 <= 0.
    double sup_bound(double b) const {
        return kind == PenaltyKind::ExpBoth ? std::exp(theta1 * b) : 1.0;
    }
};

} // namespace levygs
