#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "nlkg/params.hpp"

namespace nlkg {

using cplx = std::complex<double>;

inline double sphere_area(int d) {
    // |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)
    return 2.0 * std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0);
}

/// Staggered radial grid, nodes r_i = (i + 1/2) h, with d-dimensional
/// quadrature weights w_i = |S^{d-1}| r_i^{d-1} h.  No node sits at the
/// r = 0 singularity of the potential.
struct RadialGrid {
    int d = 3;
    double h = 0.0;
    double r_max = 0.0;
    int n = 0;
    std::vector<double> r;          ///< node radii
    std::vector<double> w;          ///< quadrature weights
    std::vector<double> face_pow;   ///< r_{i+1/2}^{d-1}, i = 0..n-1 (flux faces)
    std::vector<double> flux_w;     ///< |S^{d-1}| h r_{i+1/2}^{d-1}
    double area = 0.0;              ///< |S^{d-1}|
};

using GridPtr = std::shared_ptr<const RadialGrid>;

inline GridPtr make_grid(int d, double r_max, int n) {
    if (d < 3) throw parameter_error("grid dimension must satisfy d >= 3");
    if (n < 16) throw parameter_error("grid size must satisfy n >= 16");
    if (!(r_max > 0.0)) throw parameter_error("grid radius must be positive");
    auto g = std::make_shared<RadialGrid>();
    g->d = d;
    g->n = n;
    g->r_max = r_max;
    g->h = r_max / n;
    g->area = sphere_area(d);
    g->r.resize(n);
    g->w.resize(n);
    g->face_pow.resize(n);
    g->flux_w.resize(n);
    for (int i = 0; i < n; ++i) {
        g->r[i] = (i + 0.5) * g->h;
        g->w[i] = g->area * std::pow(g->r[i], d - 1) * g->h;
        const double rf = (i + 1.0) * g->h;
        g->face_pow[i] = std::pow(rf, d - 1);
        g->flux_w[i] = g->area * g->h * g->face_pow[i];
    }
    return g;
}

/// Complex samples on a RadialGrid.
struct RadialField {
    GridPtr grid;
    std::vector<cplx> u;

    RadialField() = default;
    explicit RadialField(GridPtr g) : grid(std::move(g)), u(grid->n, cplx{0.0, 0.0}) {}
    RadialField(GridPtr g, std::vector<cplx> samples) : grid(std::move(g)), u(std::move(samples)) {
        if (static_cast<int>(u.size()) != grid->n)
            throw parameter_error("field sample count does not match grid");
    }

    int size() const { return grid->n; }
    cplx& operator[](int i) { return u[i]; }
    const cplx& operator[](int i) const { return u[i]; }

    bool all_finite() const {
        for (const auto& z : u)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }
};

inline RadialField real_field(GridPtr g, const std::vector<double>& vals) {
    RadialField f(g);
    for (int i = 0; i < g->n; ++i) f.u[i] = cplx{vals[i], 0.0};
    return f;
}

/// Phase-space point (u, du/dt) at time t; both fields share one grid.
struct StateSnapshot {
    RadialField u;
    RadialField v;
    double t = 0.0;

    StateSnapshot() = default;
    StateSnapshot(RadialField uu, RadialField vv, double tt)
        : u(std::move(uu)), v(std::move(vv)), t(tt) {
        if (u.grid.get() != v.grid.get())
            throw parameter_error("snapshot fields must share one grid");
    }
};

}  // namespace nlkg
