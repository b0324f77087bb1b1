#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "levygs/errors.hpp"

namespace levygs {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A stream is
// keyed by (seed, stream_id) and indexed by a 64-bit block counter, so any
// path of a Monte Carlo run owns a reproducible substream independent of how
// work is scheduled across threads.
namespace philox {

inline constexpr uint32_t W32A = 0x9E3779B9u;
inline constexpr uint32_t W32B = 0xBB67AE85u;
inline constexpr uint32_t M4x32A = 0xD2511F53u;
inline constexpr uint32_t M4x32B = 0xCD9E8D57u;

inline void round_once(std::array<uint32_t, 4>& ctr, const std::array<uint32_t, 2>& key) {
    const uint64_t p0 = static_cast<uint64_t>(M4x32A) * ctr[0];
    const uint64_t p1 = static_cast<uint64_t>(M4x32B) * ctr[2];
    const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
    const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

inline std::array<uint32_t, 4> block(uint64_t seed, uint64_t stream, uint64_t counter) {
    std::array<uint32_t, 4> ctr = {
        static_cast<uint32_t>(counter), static_cast<uint32_t>(counter >> 32),
        static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32)};
    std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed),
                                   static_cast<uint32_t>(seed >> 32)};
    for (int r = 0; r < 10; ++r) {
        round_once(ctr, key);
        key[0] += W32A;
        key[1] += W32B;
    }
    return ctr;
}

} // namespace philox

// Wichura's AS241 (PPND16) inverse of the standard normal CDF; accurate to
// about 1e-15 over (0,1).
inline double inverse_normal_cdf(double p) {
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    if (!(r > 0.0)) throw DomainError("inverse_normal_cdf: p outside (0,1)");
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                  3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -val : val;
}

// Per-path deterministic stream. When `mirror` is set, every uniform is
// reflected to 1-u, which flips normals and reuses the stream for an
// antithetic partner.
class PathRng {
public:
    PathRng(uint64_t seed, uint64_t stream, bool mirror = false)
        : seed_(seed), stream_(stream), mirror_(mirror) {}

    double uniform() {
        if (pos_ == 4) {
            buf_ = philox::block(seed_, stream_, counter_++);
            pos_ = 0;
        }
        const uint32_t lo = buf_[pos_++];
        uint32_t hi;
        if (pos_ == 4) {
            buf_ = philox::block(seed_, stream_, counter_++);
            pos_ = 0;
        }
        hi = buf_[pos_++];
        const uint64_t bits = (static_cast<uint64_t>(hi) << 32) | lo;
        // (k + 0.5) * 2^-53 lies strictly inside (0,1) and mirrors exactly.
        const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
        return mirror_ ? 1.0 - u : u;
    }

    double normal() { return inverse_normal_cdf(uniform()); }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

private:
    uint64_t seed_, stream_;
    uint64_t counter_ = 0;
    std::array<uint32_t, 4> buf_{};
    int pos_ = 4;
    bool mirror_;
};

} // namespace levygs
