#pragma once

#include <cstdint>

#include "nlkg/grid.hpp"

namespace nlkg {

/// Counter-based splitmix64: value k of stream `seed` is a pure function of
/// (seed, k), identical on every platform.
struct SplitMix64 {
    std::uint64_t seed;
    std::uint64_t counter = 0;

    static std::uint64_t hash(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t next_u64() { return hash(seed + 0x9e3779b97f4a7c15ULL * (++counter)); }

    /// uniform in [0, 1)
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// standard normal via Box-Muller on two counter draws
    double normal() {
        double u1 = uniform(), u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
};

/// Smooth random radial field: a few reflected Gaussian bumps, which keeps the
/// function even in r (regular at the origin) and supported well inside r_max.
inline RadialField smooth_bump_field(GridPtr g, std::uint64_t seed, int n_bumps = 4,
                                     double r_lo = 1.0, double r_hi = 0.0,
                                     double w_lo = 0.5, double w_hi = 3.0) {
    if (r_hi <= 0.0) r_hi = 0.4 * g->r_max;
    SplitMix64 rng{seed};
    RadialField f(g);
    for (int b = 0; b < n_bumps; ++b) {
        const double c = rng.normal();
        const double rho = rng.uniform(r_lo, r_hi);
        const double s = rng.uniform(w_lo, w_hi);
        for (int i = 0; i < g->n; ++i) {
            const double r = g->r[i];
            const double e1 = (r - rho) / s, e2 = (r + rho) / s;
            f.u[i] += c * (std::exp(-e1 * e1) + std::exp(-e2 * e2));
        }
    }
    return f;
}

}  // namespace nlkg
