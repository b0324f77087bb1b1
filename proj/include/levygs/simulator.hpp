#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "levygs/errors.hpp"
#include "levygs/levy_model.hpp"
#include "levygs/penalty.hpp"
#include "levygs/rng.hpp"
#include "levygs/severity.hpp"

namespace levygs {

struct SimConfig {
    std::int64_t n_paths = 100000;
    std::uint64_t seed = 1;
    double horizon = 10000.0;       // censoring bound in model time units
    double euler_dt = 1e-3;         // diffusive case only
    double excursion_floor = 1e-4;  // minimum tracked sub-grid dip depth
    bool antithetic = false;
    bool bridge_sampling = true;    // sample step extrema from the Brownian bridge
    int threads = 0;                // 0 = hardware concurrency

    void validate() const {
        if (n_paths < 1) throw ValidationError("n_paths must be >= 1");
        if (!(horizon > 0.0)) throw ValidationError("horizon must be > 0");
        if (!(euler_dt > 0.0)) throw ValidationError("euler_dt must be > 0");
        if (!(excursion_floor > 0.0)) throw ValidationError("excursion_floor must be > 0");
        if (threads < 0) throw ValidationError("threads must be >= 0");
    }
};

struct SimEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t n_paths = 0;
    std::int64_t n_bankrupt = 0;
    std::int64_t n_upcrossed = 0;
    std::int64_t n_censored = 0;
    double censor_bound = 0.0;  // bound on the discounted mass censoring can hide
    bool floor_bias_possible = false;
    std::int64_t sanity_violations = 0;
    // Refinement report for the diffusive scheme: same estimator at dt/2.
    bool has_refinement = false;
    double dt = 0.0;
    double mean_half_dt = 0.0;
    double se_half_dt = 0.0;
};

namespace simdetail {

enum class Outcome : int { Bankrupt = 0, Upcrossed = 1, Censored = 2 };

struct PathResult {
    double value = 0.0;
    Outcome outcome = Outcome::Censored;
    int violations = 0;
};

struct Accumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t n_samples = 0;
    std::int64_t counts[3] = {0, 0, 0};
    std::int64_t violations = 0;

    void add_sample(double v) {
        sum += v;
        sum_sq += v * v;
        ++n_samples;
    }
    void merge(const Accumulator& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        n_samples += o.n_samples;
        for (int i = 0; i < 3; ++i) counts[i] += o.counts[i];
        violations += o.violations;
    }
};

// Order-fixed pairwise tree over per-block partial sums: the result depends
// only on the block boundaries, never on which thread ran which block.
inline Accumulator pairwise_merge(const std::vector<Accumulator>& blocks, std::size_t lo,
                                  std::size_t hi) {
    if (hi - lo == 1) return blocks[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    Accumulator a = pairwise_merge(blocks, lo, mid);
    a.merge(pairwise_merge(blocks, mid, hi));
    return a;
}

template <class PathFn>
SimEstimate run_paths(const SimConfig& cfg, double sup_f, double q, PathFn&& path_fn) {
    cfg.validate();
    const std::int64_t n = cfg.n_paths;
    const bool anti = cfg.antithetic;
    const std::int64_t n_units = anti ? (n + 1) / 2 : n;
    constexpr std::int64_t kBlock = 2048;
    const std::size_t n_blocks = static_cast<std::size_t>((n_units + kBlock - 1) / kBlock);

    std::vector<Accumulator> blocks(n_blocks);
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t bi = next.fetch_add(1);
            if (bi >= n_blocks) return;
            Accumulator acc;
            const std::int64_t u_lo = static_cast<std::int64_t>(bi) * kBlock;
            const std::int64_t u_hi = std::min(n_units, u_lo + kBlock);
            for (std::int64_t u = u_lo; u < u_hi; ++u) {
                if (!anti) {
                    PathRng rng(cfg.seed, static_cast<std::uint64_t>(u), false);
                    PathResult r = path_fn(rng);
                    acc.add_sample(r.value);
                    ++acc.counts[static_cast<int>(r.outcome)];
                    acc.violations += r.violations;
                } else {
                    PathRng rng_a(cfg.seed, static_cast<std::uint64_t>(u), false);
                    PathResult ra = path_fn(rng_a);
                    ++acc.counts[static_cast<int>(ra.outcome)];
                    acc.violations += ra.violations;
                    const std::int64_t partner = 2 * u + 1;
                    if (partner < n) {
                        PathRng rng_b(cfg.seed, static_cast<std::uint64_t>(u), true);
                        PathResult rb = path_fn(rng_b);
                        ++acc.counts[static_cast<int>(rb.outcome)];
                        acc.violations += rb.violations;
                        acc.add_sample(0.5 * (ra.value + rb.value));
                    } else {
                        acc.add_sample(ra.value);
                    }
                }
            }
            blocks[bi] = acc;
        }
    };

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned n_threads =
        cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : hw;
    if (n_threads <= 1 || n_blocks <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    const Accumulator total = pairwise_merge(blocks, 0, n_blocks);
    SimEstimate est;
    est.n_paths = n;
    est.n_bankrupt = total.counts[0];
    est.n_upcrossed = total.counts[1];
    est.n_censored = total.counts[2];
    est.sanity_violations = total.violations;
    const std::int64_t ns = total.n_samples;
    est.mean = total.sum / static_cast<double>(ns);
    if (ns > 1) {
        const double var =
            std::max(0.0, (total.sum_sq - total.sum * total.sum / ns) / (ns - 1));
        est.std_error = std::sqrt(var / ns);
    }
    const double frac_censored = static_cast<double>(est.n_censored) / n;
    est.censor_bound = frac_censored * sup_f * (q > 0.0 ? std::exp(-q * cfg.horizon) : 1.0);
    if (est.censor_bound > 0.1 * std::max(est.std_error, 1e-14))
        throw HorizonTooShort("censoring bound " + std::to_string(est.censor_bound) +
                              " exceeds 0.1 * std_error; raise horizon");
    return est;
}

// Minimum of a Brownian bridge from a to c over a step of length h,
// conditional on the endpoints (drift drops out): inverse-CDF sample.
inline double bridge_min(double a, double c, double sigma2h, double u) {
    const double s = -0.5 * sigma2h * std::log(u);
    return 0.5 * (a + c - std::sqrt((a - c) * (a - c) + 4.0 * s));
}

inline double bridge_max(double a, double c, double sigma2h, double u) {
    const double s = -0.5 * sigma2h * std::log(u);
    return 0.5 * (a + c + std::sqrt((a - c) * (a - c) + 4.0 * s));
}

// Mixed-exponential claim size.
inline double sample_claim(const LevyModel& m, PathRng& rng) {
    if (m.claims.size() == 1) return rng.exponential(m.claims.front().rate);
    double u = rng.uniform();
    for (const auto& comp : m.claims) {
        if (u <= comp.weight) return rng.exponential(comp.rate);
        u -= comp.weight;
    }
    return rng.exponential(m.claims.back().rate);
}

} // namespace simdetail

// ---------------------------------------------------------------------------
// Bounded variation: exact event-driven simulation. Between claims the path
// is linear with slope c, so barrier hits and recoveries solve in closed
// form; each ruin jump opens a negative excursion carrying a fresh mark Y,
// and bankruptcy is the first jump inside an excursion that lands below -Y.
// ---------------------------------------------------------------------------

inline SimEstimate simulate_bv(const LevyModel& model, double x, double q, double b,
                               const PenaltySpec& f, const SeverityDistribution& Y_law,
                               const SimConfig& cfg) {
    model.validate();
    if (model.variation_class() != VariationClass::Bounded)
        throw DomainError("simulate_bv: bounded-variation models only");
    if (x < 0.0 || x > b) throw ValidationError("simulate_bv: need 0 <= x <= b");
    const double c = model.drift;
    const double lam_j = model.jump_rate;
    const double sup_f = f.sup_bound(b);

    auto path = [&](PathRng& rng) {
        simdetail::PathResult res;
        double t = 0.0, X = x;
        bool in_excursion = false;
        double mark = 0.0;
        double first_ruin = -1.0;
        for (;;) {
            const double jump_wait = rng.exponential(lam_j);
            const double t_jump = t + jump_wait;
            if (X >= 0.0) {
                const double t_hit_b = t + (b - X) / c;
                if (t_hit_b <= t_jump) {
                    if (t_hit_b > cfg.horizon) {
                        res.outcome = simdetail::Outcome::Censored;
                        return res;
                    }
                    res.outcome = simdetail::Outcome::Upcrossed;
                    return res;
                }
            } else {
                const double t_rec = t + (0.0 - X) / c;
                if (t_rec <= t_jump) {
                    if (t_rec > cfg.horizon) {
                        res.outcome = simdetail::Outcome::Censored;
                        return res;
                    }
                    t = t_rec;
                    X = 0.0;
                    in_excursion = false;
                    // Next claim clock restarts; exponential waits are
                    // memoryless so this stays exact.
                    continue;
                }
            }
            if (t_jump > cfg.horizon) {
                res.outcome = simdetail::Outcome::Censored;
                return res;
            }
            const double pre = X + c * (t_jump - t);
            const double post = pre - simdetail::sample_claim(model, rng);
            t = t_jump;
            X = post;
            if (pre >= 0.0 && post < 0.0) {
                in_excursion = true;
                mark = Y_law.sample(rng);
                if (first_ruin < 0.0) first_ruin = t;
                if (post < -mark) {
                    res.value = std::exp(-q * t) * f(pre, post);
                    res.outcome = simdetail::Outcome::Bankrupt;
                    if (t < first_ruin - 1e-12) ++res.violations;
                    return res;
                }
            } else if (in_excursion && post < -mark) {
                res.value = std::exp(-q * t) * f(pre, post);
                res.outcome = simdetail::Outcome::Bankrupt;
                if (first_ruin < 0.0 || t < first_ruin - 1e-12) ++res.violations;
                return res;
            }
        }
    };
    return simdetail::run_paths(cfg, sup_f, q, path);
}

// ---------------------------------------------------------------------------
// Unbounded variation: Gaussian stepping (exact in distribution at the grid
// and at claim times) with Brownian-bridge extrema inside steps. An excursion
// runs from one zero contact to the next; its positive part carries the
// creeping clock, its negative part the depth mark. Zero contacts detected by
// bridge minima reset both. Sub-grid dips shallower than excursion_floor are
// not tested against the mark; when the severity law has mass below the
// floor this bias is flagged, not hidden.
// ---------------------------------------------------------------------------

namespace simdetail {

struct UbvSpec {
    const LevyModel* model;
    double x, q, b;
    const PenaltySpec* f;
    const SeverityDistribution* Y;
    double lambda;
    double dt;
    double horizon;
    double floor_eps;
    bool bridge;
};

inline PathResult run_ubv_path(const UbvSpec& sp, PathRng& rng) {
    PathResult res;
    const LevyModel& m = *sp.model;
    const double mu = m.drift;
    const double sig = m.sigma;
    const double q = sp.q;
    const double b = sp.b;
    const bool jumps = m.has_jumps();
    const double reach = 8.0 * sig;  // in units of sqrt(step length)

    double t = 0.0, X = sp.x;
    int phase = X > 0.0 ? +1 : -1;  // side of 0 inside the current excursion
    bool phase_known = X != 0.0;
    double exc_start = 0.0;
    double mark = sp.Y->sample(rng);
    double clock = rng.exponential(sp.lambda);
    double first_ruin = -1.0;

    auto open_excursion = [&](double at) {
        exc_start = at;
        mark = sp.Y->sample(rng);
        clock = rng.exponential(sp.lambda);
    };

    auto bankrupt = [&](double at, double pre, double post) {
        res.value = std::exp(-q * at) * (*sp.f)(pre, post);
        res.outcome = Outcome::Bankrupt;
        if (first_ruin >= 0.0 && at < first_ruin - 1e-9) ++res.violations;
    };

    double next_jump = jumps ? rng.exponential(m.jump_rate) : sp.horizon * 2.0;

    while (t < sp.horizon) {
        const bool is_jump = jumps && next_jump <= t + sp.dt;
        const double h = std::min(is_jump ? next_jump - t : sp.dt, sp.horizon - t);
        if (h > 0.0) {
            const double a = X;
            const double c = a + mu * h + sig * std::sqrt(h) * rng.normal();
            const double sigma2h = sig * sig * h;
            const double span = reach * std::sqrt(h);

            if (!phase_known) {
                phase = c >= 0.0 ? +1 : -1;
                phase_known = true;
            }

            if (phase > 0) {
                // Barrier.
                if (c >= b) {
                    const double tau = t + h * (b - a) / (c - a);
                    if (tau > sp.horizon) break;
                    res.outcome = Outcome::Upcrossed;
                    return res;
                }
                if (sp.bridge && b - std::max(a, c) < span) {
                    const double M = bridge_max(a, c, sigma2h, rng.uniform());
                    if (M >= b) {
                        res.outcome = Outcome::Upcrossed;
                        return res;
                    }
                }
                if (c < 0.0) {
                    // Continuous down-crossing ends the positive part.
                    const double tau = t + h * a / (a - c);
                    if (first_ruin < 0.0) first_ruin = tau;
                    if (tau - exc_start > clock) {
                        bankrupt(tau, 0.0, 0.0);
                        return res;
                    }
                    open_excursion(tau);
                    phase = -1;
                    // Depth of the remainder of the step, from 0 to c.
                    double mn = c;
                    if (sp.bridge)
                        mn = bridge_min(0.0, c, sig * sig * (t + h - tau), rng.uniform());
                    if (mn < -mark) {
                        bankrupt(tau + (t + h - tau) * 0.5, -mark, -mark);
                        return res;
                    }
                } else if (sp.bridge && std::min(a, c) < span) {
                    const double mn = bridge_min(a, c, sigma2h, rng.uniform());
                    if (mn <= 0.0) {
                        // Sub-grid contact with 0: the excursion ended there.
                        const double denom = (a - mn) + (c - mn);
                        const double tau =
                            t + (denom > 0.0 ? h * a / denom : 0.5 * h);
                        if (first_ruin < 0.0) first_ruin = tau;
                        if (tau - exc_start > clock) {
                            bankrupt(tau, 0.0, 0.0);
                            return res;
                        }
                        open_excursion(tau);
                        if (-mn >= sp.floor_eps && mn < -mark) {
                            bankrupt(tau, -mark, -mark);
                            return res;
                        }
                        // Dip closed; a fresh excursion continues above 0.
                        open_excursion(tau);
                    }
                }
            } else {
                // Negative side: the mark is the only barrier below, zero the only one above.
                double mn = std::min(a, c);
                if (sp.bridge) mn = bridge_min(a, c, sigma2h, rng.uniform());
                if (mn < -mark) {
                    const double denom = (a - mn) + (c - mn);
                    const double frac = denom > 0.0 ? (a + mark) / denom : 0.5;
                    bankrupt(t + h * std::min(1.0, std::max(0.0, frac)), -mark, -mark);
                    return res;
                }
                if (c >= 0.0) {
                    // Recovery: excursion closes at the up-crossing.
                    const double tau = t + h * a / (a - c);
                    open_excursion(tau);
                    phase = +1;
                }
            }
            X = c;
            t += h;
        }
        if (is_jump && t < sp.horizon) {
            const double pre = X;
            const double post = pre - sample_claim(m, rng);
            if (!phase_known) {
                phase = +1;
                phase_known = true;
            }
            if (phase > 0 && post < 0.0) {
                if (first_ruin < 0.0) first_ruin = t;
                if (post < -mark) {
                    bankrupt(t, pre, post);
                    return res;
                }
                phase = -1;
            } else if (phase < 0 && post < -mark) {
                bankrupt(t, pre, post);
                return res;
            }
            X = post;
            next_jump = t + rng.exponential(m.jump_rate);
        }
    }
    res.outcome = Outcome::Censored;
    return res;
}

} // namespace simdetail

inline SimEstimate simulate_ubv(const LevyModel& model, double x, double q, double b,
                                const PenaltySpec& f, const SeverityDistribution& Y_law,
                                const CreepClock& clock, const SimConfig& cfg) {
    model.validate();
    if (model.variation_class() != VariationClass::Unbounded)
        throw DomainError("simulate_ubv: unbounded-variation models only");
    if (x < 0.0 || x > b) throw ValidationError("simulate_ubv: need 0 <= x <= b");
    const double sup_f = f.sup_bound(b);

    auto run_at = [&](double dt) {
        simdetail::UbvSpec sp{&model, x, q, b, &f, &Y_law, clock.lambda,
                              dt, cfg.horizon, cfg.excursion_floor, cfg.bridge_sampling};
        return simdetail::run_paths(cfg, sup_f, q, [&](PathRng& rng) {
            return simdetail::run_ubv_path(sp, rng);
        });
    };

    SimEstimate est = run_at(cfg.euler_dt);
    SimEstimate half = run_at(0.5 * cfg.euler_dt);
    est.has_refinement = true;
    est.dt = cfg.euler_dt;
    est.mean_half_dt = half.mean;
    est.se_half_dt = half.std_error;
    est.floor_bias_possible = Y_law.min_support() < cfg.excursion_floor;
    const double gap = std::fabs(est.mean - half.mean);
    const double se_comb =
        std::sqrt(est.std_error * est.std_error + half.std_error * half.std_error);
    // Raw-grid runs (bridge sampling off) exist to expose grid bias, so the
    // stability gate only applies to the production scheme.
    if (cfg.bridge_sampling && gap > 5.0 * std::max(se_comb, 1e-14))
        throw DiscretizationUnstable("dt and dt/2 estimates differ by " +
                                     std::to_string(gap) + " > 5 SE");
    return est;
}

// MC estimate of E_x[ e^{-q tau_a^+} 1{tau_a^+ <= tau_0^-} ].
inline SimEstimate estimate_two_sided_exit(const LevyModel& model, double x, double a,
                                           double q, const SimConfig& cfg) {
    model.validate();
    if (x < 0.0 || x > a) throw ValidationError("two_sided_exit: need 0 <= x <= a");

    if (model.variation_class() == VariationClass::Bounded) {
        const double c = model.drift;
        auto path = [&](PathRng& rng) {
            simdetail::PathResult res;
            if (x >= a) {  // up-crossing is immediate
                res.value = 1.0;
                res.outcome = simdetail::Outcome::Upcrossed;
                return res;
            }
            double t = 0.0, X = x;
            for (;;) {
                const double t_jump = t + rng.exponential(model.jump_rate);
                const double t_hit = t + (a - X) / c;
                if (t_hit <= t_jump) {
                    if (t_hit > cfg.horizon) {
                        res.outcome = simdetail::Outcome::Censored;
                        return res;
                    }
                    res.value = std::exp(-q * t_hit);
                    res.outcome = simdetail::Outcome::Upcrossed;
                    return res;
                }
                if (t_jump > cfg.horizon) {
                    res.outcome = simdetail::Outcome::Censored;
                    return res;
                }
                X += c * (t_jump - t) - simdetail::sample_claim(model, rng);
                t = t_jump;
                if (X < 0.0) {
                    res.outcome = simdetail::Outcome::Bankrupt;
                    return res;
                }
            }
        };
        return simdetail::run_paths(cfg, 1.0, q, path);
    }

    const double mu = model.drift;
    const double sig = model.sigma;
    const bool jumps = model.has_jumps();
    auto path = [&](PathRng& rng) {
        simdetail::PathResult res;
        if (x >= a) {  // regular upward: up-crossing is immediate
            res.value = 1.0;
            res.outcome = simdetail::Outcome::Upcrossed;
            return res;
        }
        double t = 0.0, X = x;
        double next_jump = jumps ? rng.exponential(model.jump_rate) : cfg.horizon * 2.0;
        while (t < cfg.horizon) {
            const bool is_jump = jumps && next_jump <= t + cfg.euler_dt;
            const double h =
                std::min(is_jump ? next_jump - t : cfg.euler_dt, cfg.horizon - t);
            const double aa = X;
            const double cc = aa + mu * h + sig * std::sqrt(h) * rng.normal();
            const double sigma2h = sig * sig * h;
            const double span = 8.0 * sig * std::sqrt(h);

            double tau_up = -1.0, tau_dn = -1.0;
            if (cc >= a) {
                tau_up = t + h * (a - aa) / (cc - aa);
            } else if (cfg.bridge_sampling && a - std::max(aa, cc) < span) {
                const double M = simdetail::bridge_max(aa, cc, sigma2h, rng.uniform());
                if (M >= a) tau_up = t + 0.5 * h;
            }
            if (cc < 0.0) {
                tau_dn = t + h * aa / (aa - cc);
            } else if (cfg.bridge_sampling && std::min(aa, cc) < span) {
                const double mn = simdetail::bridge_min(aa, cc, sigma2h, rng.uniform());
                if (mn < 0.0) tau_dn = t + 0.5 * h;
            }
            if (tau_up >= 0.0 && (tau_dn < 0.0 || tau_up <= tau_dn)) {
                res.value = std::exp(-q * tau_up);
                res.outcome = simdetail::Outcome::Upcrossed;
                return res;
            }
            if (tau_dn >= 0.0) {
                res.outcome = simdetail::Outcome::Bankrupt;
                return res;
            }
            X = cc;
            t += h;
            if (is_jump && t < cfg.horizon) {
                X -= simdetail::sample_claim(model, rng);
                next_jump = t + rng.exponential(model.jump_rate);
                if (X < 0.0) {
                    res.outcome = simdetail::Outcome::Bankrupt;
                    return res;
                }
            }
        }
        res.outcome = simdetail::Outcome::Censored;
        return res;
    };
    return simdetail::run_paths(cfg, 1.0, q, path);
}

} // namespace levygs
