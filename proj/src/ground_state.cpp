#include "nlkg/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "nlkg/field_ops.hpp"

namespace nlkg {

namespace {

// ---------------------------------------------------------------------------
// profile ODE:  Q'' + (d-1)/r Q' - gamma/r^2 Q - (1-w^2) Q + |Q|^{p-1} Q = 0
// ---------------------------------------------------------------------------

struct OdeParams {
    double d, p, gamma, k2;  // k2 = 1 - omega^2
};

inline void ode_rhs(const OdeParams& o, double r, const double y[2], double dy[2]) {
    const double Q = y[0], P = y[1];
    dy[0] = P;
    dy[1] = -(o.d - 1) / r * P + o.gamma / (r * r) * Q + o.k2 * Q -
            std::pow(std::abs(Q), o.p - 1.0) * Q;
}

// Cash-Karp embedded 4(5) pair with standard error control.
struct RkStepper {
    OdeParams o;
    double atol = 1e-14, rtol = 1e-12;

    // advances (r, y) by at most (r_stop - r); returns actual new r
    double step_to(double r, double r_stop, double y[2], double& hint) const {
        static constexpr double a2 = 0.2, a3 = 0.3, a4 = 0.6, a5 = 1.0, a6 = 0.875;
        static constexpr double b21 = 0.2;
        static constexpr double b31 = 3.0 / 40, b32 = 9.0 / 40;
        static constexpr double b41 = 0.3, b42 = -0.9, b43 = 1.2;
        static constexpr double b51 = -11.0 / 54, b52 = 2.5, b53 = -70.0 / 27, b54 = 35.0 / 27;
        static constexpr double b61 = 1631.0 / 55296, b62 = 175.0 / 512, b63 = 575.0 / 13824,
                                b64 = 44275.0 / 110592, b65 = 253.0 / 4096;
        static constexpr double c1 = 37.0 / 378, c3 = 250.0 / 621, c4 = 125.0 / 594,
                                c6 = 512.0 / 1771;
        static constexpr double d1 = c1 - 2825.0 / 27648, d3 = c3 - 18575.0 / 48384,
                                d4 = c4 - 13525.0 / 55296, d5 = -277.0 / 14336,
                                d6 = c6 - 0.25;
        double h = std::min(hint, r_stop - r);
        double k1[2], k2v[2], k3[2], k4[2], k5[2], k6[2], yt[2], yerr[2], ynew[2];
        ode_rhs(o, r, y, k1);
        for (int attempt = 0; attempt < 60; ++attempt) {
            yt[0] = y[0] + h * b21 * k1[0];
            yt[1] = y[1] + h * b21 * k1[1];
            ode_rhs(o, r + a2 * h, yt, k2v);
            yt[0] = y[0] + h * (b31 * k1[0] + b32 * k2v[0]);
            yt[1] = y[1] + h * (b31 * k1[1] + b32 * k2v[1]);
            ode_rhs(o, r + a3 * h, yt, k3);
            yt[0] = y[0] + h * (b41 * k1[0] + b42 * k2v[0] + b43 * k3[0]);
            yt[1] = y[1] + h * (b41 * k1[1] + b42 * k2v[1] + b43 * k3[1]);
            ode_rhs(o, r + a4 * h, yt, k4);
            yt[0] = y[0] + h * (b51 * k1[0] + b52 * k2v[0] + b53 * k3[0] + b54 * k4[0]);
            yt[1] = y[1] + h * (b51 * k1[1] + b52 * k2v[1] + b53 * k3[1] + b54 * k4[1]);
            ode_rhs(o, r + a5 * h, yt, k5);
            yt[0] = y[0] + h * (b61 * k1[0] + b62 * k2v[0] + b63 * k3[0] + b64 * k4[0] +
                                b65 * k5[0]);
            yt[1] = y[1] + h * (b61 * k1[1] + b62 * k2v[1] + b63 * k3[1] + b64 * k4[1] +
                                b65 * k5[1]);
            ode_rhs(o, r + a6 * h, yt, k6);
            for (int j = 0; j < 2; ++j) {
                ynew[j] = y[j] + h * (c1 * k1[j] + c3 * k3[j] + c4 * k4[j] + c6 * k6[j]);
                yerr[j] = h * (d1 * k1[j] + d3 * k3[j] + d4 * k4[j] + d5 * k5[j] + d6 * k6[j]);
            }
            double errmax = 0.0;
            for (int j = 0; j < 2; ++j) {
                const double sc = atol + rtol * std::max(std::abs(y[j]), std::abs(ynew[j]));
                errmax = std::max(errmax, std::abs(yerr[j]) / sc);
            }
            if (errmax <= 1.0 || h <= 1e-14 * r_stop) {
                const double rn = r + h;
                y[0] = ynew[0];
                y[1] = ynew[1];
                const double grow = errmax > 1e-30 ? 0.9 * std::pow(errmax, -0.2) : 5.0;
                hint = h * std::clamp(grow, 0.2, 5.0);
                return rn;
            }
            h *= std::clamp(0.9 * std::pow(errmax, -0.25), 0.1, 0.5);
        }
        throw numerical_error("profile integrator step failure near r = " + std::to_string(r));
    }
};

// two-term series start; for gamma > 0 the regular branch is a r^sigma (1 + c2 r^2),
// for gamma = 0 it is a + c r^2 with the nonlinearity entering at leading order
void series_start(const ModelParams& mp, double a, double& r0, double y[2]) {
    const double k2 = mp.one_minus_omega_sq();
    if (mp.gamma > 0.0) {
        const double sg = mp.sigma;
        r0 = std::min(1e-3, 1e-3 / std::sqrt(k2));
        const double c2 = k2 / (2.0 * (2.0 * sg + mp.d));
        y[0] = a * std::pow(r0, sg) * (1.0 + c2 * r0 * r0);
        y[1] = a * (sg * std::pow(r0, sg - 1.0) + (sg + 2.0) * c2 * std::pow(r0, sg + 1.0));
    } else {
        r0 = 1e-4;
        const double c = (k2 * a - std::pow(a, mp.p)) / (2.0 * mp.d);
        y[0] = a + c * r0 * r0;
        y[1] = 2.0 * c * r0;
    }
}

}  // namespace

ShootResult shoot(const ModelParams& mp, double a, double r_end, const RadialGrid* grid) {
    if (!(a > 0.0)) throw parameter_error("shooting amplitude must be positive");
    if (mp.gamma < 0.0)
        throw parameter_error("shooting requires gamma >= 0 (regular origin branch)");
    OdeParams o{static_cast<double>(mp.d), mp.p, mp.gamma, mp.one_minus_omega_sq()};
    RkStepper rk{o};
    double r, y[2];
    series_start(mp, a, r, y);

    ShootResult out;
    if (grid) out.at_nodes.assign(grid->n, 0.0);
    int node = 0;
    if (grid) {
        while (node < grid->n && grid->r[node] <= r) {
            // nodes inside the series region get the series value
            const double rr = grid->r[node];
            if (mp.gamma > 0.0) {
                const double c2 = o.k2 / (2.0 * (2.0 * mp.sigma + mp.d));
                out.at_nodes[node] = a * std::pow(rr, mp.sigma) * (1.0 + c2 * rr * rr);
            } else {
                out.at_nodes[node] = a + (o.k2 * a - std::pow(a, mp.p)) / (2.0 * mp.d) * rr * rr;
            }
            ++node;
        }
    }

    double hint = 1e-4;
    bool past_max = false;
    double prev_P = y[1];
    const double floor_amp = 1e-9 * a;
    while (r < r_end) {
        const double r_stop = (grid && node < grid->n) ? grid->r[node] : r_end;
        const double rn = rk.step_to(r, r_stop, y, hint);
        r = rn;
        if (grid && node < grid->n && r >= grid->r[node] - 1e-14) {
            out.at_nodes[node] = y[0];
            ++node;
        }
        if (y[1] < 0.0) past_max = true;
        if (y[0] <= 0.0) {
            out.cls = ShootClass::Crosses;
            out.r_end = r;
            return out;
        }
        if (past_max && prev_P < 0.0 && y[1] >= 0.0 && y[0] > floor_amp) {
            out.cls = ShootClass::Rebounds;
            out.r_end = r;
            return out;
        }
        prev_P = y[1];
    }
    // reached r_end; a still-rising profile is an undershoot
    out.cls = (y[1] > 0.0 && y[0] > 1e-6 * a) ? ShootClass::Rebounds : ShootClass::Decays;
    out.r_end = r;
    return out;
}

namespace {

// tridiagonal Thomas solve, in place on copies
std::vector<double> thomas(const std::vector<double>& lo, std::vector<double> diag,
                           const std::vector<double>& up, std::vector<double> rhs) {
    const int n = static_cast<int>(diag.size());
    for (int i = 1; i < n; ++i) {
        const double m = lo[i - 1] / diag[i - 1];
        diag[i] -= m * up[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = (rhs[i] - up[i] * x[i + 1]) / diag[i];
    return x;
}

struct StencilSystem {
    const RadialGrid& g;
    ModelParams mp;

    std::vector<double> defect(const std::vector<double>& Q) const {
        const int n = g.n;
        const double k2 = mp.one_minus_omega_sq();
        std::vector<double> F(n);
        const double ih2 = 1.0 / (g.h * g.h);
        for (int i = 0; i < n; ++i) {
            const double qp = (i + 1 < n) ? Q[i + 1] : 0.0;
            const double fo = g.face_pow[i] * (qp - Q[i]);
            const double fi = i > 0 ? g.face_pow[i - 1] * (Q[i] - Q[i - 1]) : 0.0;
            const double lap = std::pow(g.r[i], 1 - g.d) * (fo - fi) * ih2 -
                               mp.gamma * Q[i] / (g.r[i] * g.r[i]);
            F[i] = lap - k2 * Q[i] + std::pow(std::abs(Q[i]), mp.p - 1.0) * Q[i];
        }
        return F;
    }

    // Newton iteration on the stencil system; returns max-norm defect
    double newton(std::vector<double>& Q, int max_iter, double tol) const {
        const int n = g.n;
        const double k2 = mp.one_minus_omega_sq();
        const double ih2 = 1.0 / (g.h * g.h);
        std::vector<double> lo(n - 1), up(n - 1), diag(n);
        double res = 0.0;
        for (int it = 0; it < max_iter; ++it) {
            auto F = defect(Q);
            res = 0.0;
            for (double v : F) res = std::max(res, std::abs(v));
            if (res < tol) return res;
            for (int i = 0; i < n; ++i) {
                const double rp = std::pow(g.r[i], 1 - g.d);
                const double fin = i > 0 ? g.face_pow[i - 1] : 0.0;
                diag[i] = -rp * (g.face_pow[i] + fin) * ih2 - mp.gamma / (g.r[i] * g.r[i]) - k2 +
                          mp.p * std::pow(std::abs(Q[i]), mp.p - 1.0);
                if (i + 1 < n) up[i] = rp * g.face_pow[i] * ih2;
                if (i > 0) lo[i - 1] = rp * fin * ih2;
            }
            for (auto& v : F) v = -v;
            auto dQ = thomas(lo, diag, up, F);
            for (int i = 0; i < n; ++i) Q[i] += dQ[i];
        }
        return res;
    }
};

// project the shooting solution onto the grid and splice the far-field
// asymptotic C e^{-kr} r^{-(d-1)/2} beyond the last trustworthy sample
std::vector<double> project_with_tail(const ModelParams& mp, const RadialGrid& g, double a) {
    auto sr = shoot(mp, a, g.r_max, &g);
    std::vector<double> Q = sr.at_nodes;
    const double k = std::sqrt(mp.one_minus_omega_sq());
    double qmax = 0.0;
    int imax = 0;
    for (int i = 0; i < g.n; ++i)
        if (Q[i] > qmax) qmax = Q[i], imax = i;
    int j = imax;
    while (j + 1 < g.n && Q[j + 1] > 0.0 && Q[j + 1] < Q[j] && Q[j + 1] > 1e-8 * qmax) ++j;
    j = std::min(j, g.n - 2);
    const double Cmatch = Q[j] * std::exp(k * g.r[j]) * std::pow(g.r[j], (g.d - 1) / 2.0);
    for (int i = j; i < g.n; ++i)
        Q[i] = Cmatch * std::exp(-k * g.r[i]) * std::pow(g.r[i], -(g.d - 1) / 2.0);
    for (auto& v : Q) v = std::max(v, 0.0);
    return Q;
}

double bisect_amplitude(const ModelParams& mp, double r_span) {
    double a = 1.0, a_lo = -1.0, a_hi = -1.0;
    for (int i = 0; i < 200 && (a_lo < 0 || a_hi < 0); ++i) {
        const auto cls = shoot(mp, a, r_span).cls;
        if (cls == ShootClass::Crosses) {
            a_hi = a;
            a /= 1.7;
        } else {
            a_lo = a;
            a *= 1.7;
        }
        if (a > 1e12 || a < 1e-12)
            throw numerical_error("ground-state amplitude dichotomy not bracketed in [1e-12, 1e12]");
    }
    if (a_lo > a_hi) std::swap(a_lo, a_hi);
    for (int i = 0; i < 200; ++i) {
        const double am = 0.5 * (a_lo + a_hi);
        if (shoot(mp, am, r_span).cls == ShootClass::Crosses)
            a_hi = am;
        else
            a_lo = am;
        if (a_hi - a_lo < 1e-15 * a_hi) break;
    }
    return 0.5 * (a_lo + a_hi);
}

// quintic interpolation of fine-grid samples at a coarse point
double interp_at(const RadialGrid& gf, const std::vector<double>& Qf, double r) {
    const int n = gf.n;
    int j = static_cast<int>(std::floor(r / gf.h - 0.5));
    j = std::clamp(j - 2, 0, n - 6);
    double val = 0.0;
    for (int k = 0; k < 6; ++k) {
        double lk = 1.0;
        for (int m = 0; m < 6; ++m) {
            if (m == k) continue;
            lk *= (r - gf.r[j + m]) / (gf.r[j + k] - gf.r[j + m]);
        }
        val += lk * Qf[j + k];
    }
    return val;
}

void validate_ground_state(const GroundState& gs, const SolveOptions& opts) {
    const auto& rec = gs.record;
    const double scale = rec.mass + rec.kinetic;
    const auto& mp = gs.params;
    auto check_K = [&](double K, const char* name) {
        if (std::abs(K) > opts.tol_K * scale)
            throw numerical_error(std::string("stationarity identity violated: |") + name +
                                  "| = " + std::to_string(std::abs(K) / scale) + " (relative)");
    };
    check_K(rec.K_d2, "K_d2");
    check_K(rec.K_0m1, "K_0m1");
    if (mp.mass_subcritical()) check_K(rec.K_2pm1, "K_2pm1");

    // positivity and monotone tail
    const auto Q = gs.real_profile();
    double qmax = 0.0;
    int imax = 0;
    for (int i = 0; i < gs.grid->n; ++i)
        if (Q[i] > qmax) qmax = Q[i], imax = i;
    for (int i = 0; i < gs.grid->n; ++i)
        if (Q[i] < -1e-12 * qmax) throw numerical_error("profile lost positivity");
    for (int i = imax; i + 1 < gs.grid->n; ++i)
        if (Q[i + 1] > Q[i] + 1e-9 * qmax)
            throw numerical_error("profile not monotone beyond its maximum");

    // tail decay: fit log(Q r^{(d-1)/2}) over [r_max/2, 0.9 r_max];
    // slope must beat the coarse bound -1/(d+2) and, away from the
    // omega -> 1 edge, match -sqrt(1-omega^2) within 2%
    const auto& g = *gs.grid;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int i = 0; i < g.n; ++i) {
        if (g.r[i] < 0.5 * g.r_max || g.r[i] > 0.9 * g.r_max) continue;
        if (Q[i] <= 0.0) continue;
        const double x = g.r[i], y = std::log(Q[i] * std::pow(g.r[i], (g.d - 1) / 2.0));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt < 8) throw numerical_error("tail fit window underpopulated");
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    if (!(slope <= -1.0 / (mp.d + 2)))
        throw numerical_error("tail decays slower than the coarse rate bound");
    const double k = std::sqrt(mp.one_minus_omega_sq());
    if (k >= 1.5 / (mp.d + 2) && std::abs(slope + k) > 0.02 * k)
        throw numerical_error("tail decay rate off the sharp value by more than 2%");
}

}  // namespace

GroundState find_ground_state(const ModelParams& mp, GridPtr grid, const SolveOptions& opts) {
    if (mp.gamma < 0.0) throw parameter_error("ground state requires gamma >= 0");
    if (!(mp.p < 1.0 + 4.0 / (mp.d - 2)))
        throw parameter_error("ground state requires p < 1 + 4/(d-2)");

    const double r_span = grid->r_max;
    const double a = bisect_amplitude(mp, r_span);

    StencilSystem sys{*grid, mp};
    auto Q = project_with_tail(mp, *grid, a);
    double res = sys.newton(Q, opts.max_newton, 1e-12 * std::max(1.0, *std::max_element(Q.begin(), Q.end())));

    GroundState gs;
    gs.params = mp;
    gs.grid = grid;
    gs.profile = real_field(grid, Q);
    gs.amplitude = a;
    gs.residual = res;
    gs.method = "shoot";
    gs.record = make_record(gs.profile, mp);

    if (opts.refine_record) {
        // one grid doubling; the record scalars get their leading h^2 error removed
        auto gfine = make_grid(grid->d, grid->r_max, 2 * grid->n);
        std::vector<double> Qf(gfine->n);
        for (int i = 0; i < gfine->n; ++i) Qf[i] = interp_at(*grid, Q, gfine->r[i]);
        StencilSystem fsys{*gfine, mp};
        fsys.newton(Qf, opts.max_newton, 1e-12);
        const auto ff = real_field(gfine, Qf);
        const double m = (4.0 * l2_sq(ff) - gs.record.mass) / 3.0;
        const double k = (4.0 * kinetic_gamma(ff, mp.gamma) - gs.record.kinetic) / 3.0;
        const double P = (4.0 * lp_pow(ff, mp.p + 1.0) - gs.record.potential) / 3.0;
        gs.record = record_from_scalars(mp, m, k, P);
    }
    gs.r_level = gs.record.S;

    if (opts.validate) {
        if (res > opts.tol_res)
            throw numerical_error("stencil defect " + std::to_string(res) + " exceeds tolerance");
        validate_ground_state(gs, opts);
    }
    return gs;
}

GroundState constrained_minimize_T(const ModelParams& mp, GridPtr grid, const VirialIndex& idx,
                                   const RadialField& seed, const MinimizeOptions& mo) {
    idx.validate(mp.d, mp.p);
    const auto& g = *grid;
    const int n = g.n;
    const auto c = virial_coeffs(mp, idx);
    const double k2 = mp.one_minus_omega_sq();

    auto scal = [&](const std::vector<double>& f) {
        RadialField rf = real_field(grid, f);
        return std::array<double, 3>{l2_sq(rf), kinetic_gamma(rf, mp.gamma),
                                     lp_pow(rf, mp.p + 1.0)};
    };
    auto Kof = [&](const std::array<double, 3>& s) {
        return c.mass_c * s[0] + c.kin_c * s[1] + c.pot_c * s[2];
    };
    auto Sof = [&](const std::array<double, 3>& s) { return action_S_of(mp, s[0], s[1], s[2]); };
    auto Tof = [&](const std::array<double, 3>& s) {
        return Sof(s) - Kof(s) / c.mu_bar;
    };
    // K(lambda f) = lambda^2 (quadratic part) - lambda^{p+1} |pot_c| P has one
    // positive root under the admissibility signs
    auto project = [&](std::vector<double>& f) {
        auto s = scal(f);
        const double quad = c.mass_c * s[0] + c.kin_c * s[1];
        const double pot = -c.pot_c * s[2];
        if (!(pot > 0.0) || !(quad > 0.0))
            throw numerical_error("constraint projection not bracketed (degenerate iterate)");
        const double lam = std::pow(quad / pot, 1.0 / (mp.p - 1.0));
        for (auto& v : f) v *= lam;
    };

    // L2 gradients on the weighted inner product
    auto gradients = [&](const std::vector<double>& f, std::vector<double>& gT,
                         std::vector<double>& gK) {
        RadialField rf = real_field(grid, f);
        auto lap = apply_laplacian_gamma(rf, mp.gamma);
        gT.resize(n);
        gK.resize(n);
        for (int i = 0; i < n; ++i) {
            const double fp = std::pow(std::abs(f[i]), mp.p - 1.0) * f[i];
            const double gS = k2 * f[i] - lap.u[i].real() - fp;
            const double gKi =
                2.0 * c.mass_c * f[i] - 2.0 * c.kin_c * lap.u[i].real() + (mp.p + 1.0) * c.pot_c * fp;
            gT[i] = gS - gKi / c.mu_bar;
            gK[i] = gKi;
        }
    };

    // (1 - Delta_gamma)^{-1} preconditioner (Sobolev gradient)
    const double ih2 = 1.0 / (g.h * g.h);
    std::vector<double> lo(n - 1), up(n - 1), diag(n);
    for (int i = 0; i < n; ++i) {
        const double rp = std::pow(g.r[i], 1 - g.d);
        const double fin = i > 0 ? g.face_pow[i - 1] : 0.0;
        diag[i] = rp * (g.face_pow[i] + fin) * ih2 + mp.gamma / (g.r[i] * g.r[i]) + 1.0;
        if (i + 1 < n) up[i] = -rp * g.face_pow[i] * ih2;
        if (i > 0) lo[i - 1] = -rp * fin * ih2;
    }
    auto precond = [&](const std::vector<double>& b) { return thomas(lo, diag, up, b); };
    auto wdot = [&](const std::vector<double>& x, const std::vector<double>& y) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += g.w[i] * x[i] * y[i];
        return s;
    };

    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) f[i] = std::abs(seed.u[i].real()) + std::abs(seed.u[i].imag());
    {
        // scan the amplitude upward until the constraint functional turns nonpositive
        auto s = scal(f);
        if (!(s[2] > 0.0)) throw parameter_error("minimize seed must be nonzero");
        for (int tries = 0; tries < 60 && Kof(scal(f)) > 0.0; ++tries)
            for (auto& v : f) v *= 1.5;
    }
    project(f);

    auto s = scal(f);
    double T = Tof(s);
    double step = 1.0;
    std::vector<double> gT, gK;
    int iters = 0;
    for (; iters < mo.max_iter; ++iters) {
        gradients(f, gT, gK);
        auto pT = precond(gT);
        auto pK = precond(gK);
        const double denom = wdot(pK, gK);
        const double mu = denom != 0.0 ? wdot(pT, gK) / denom : 0.0;
        std::vector<double> dir(n);
        double gnorm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            dir[i] = pT[i] - mu * pK[i];
            gnorm2 += g.w[i] * dir[i] * gT[i];
        }
        if (std::abs(gnorm2) < mo.grad_tol * std::abs(T) + 1e-300) break;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls) {
            std::vector<double> fn(n);
            for (int i = 0; i < n; ++i) fn[i] = std::abs(f[i] - step * dir[i]);
            try {
                project(fn);
            } catch (const numerical_error&) {
                step *= 0.5;
                continue;
            }
            auto sn = scal(fn);
            const double Tn = Tof(sn);
            if (Tn < T - 1e-16 * std::abs(T)) {
                f = std::move(fn);
                s = sn;
                T = Tn;
                step = std::min(step * 1.3, 1e3);
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    if (iters >= mo.max_iter)
        throw numerical_error("constrained descent hit the iteration budget without stagnating");

    GroundState gs;
    gs.params = mp;
    gs.grid = grid;
    gs.profile = real_field(grid, f);
    gs.amplitude = 0.0;
    gs.method = "minimize";
    StencilSystem sys{g, mp};
    auto F = sys.defect(f);
    gs.residual = 0.0;
    for (double v : F) gs.residual = std::max(gs.residual, std::abs(v));
    gs.record = make_record(gs.profile, mp);
    gs.r_level = gs.record.S;
    return gs;
}

GroundState rescale_omega(const GroundState& gs0, double omega_new, GridPtr target_grid) {
    if (gs0.params.omega != 0.0)
        throw parameter_error("rescale_omega expects a profile solved at omega = 0");
    if (!(std::abs(omega_new) < 1.0)) throw parameter_error("|omega_new| must be below 1");
    const auto mp = make_params(gs0.params.d, gs0.params.p, gs0.params.gamma, omega_new);
    GridPtr grid = target_grid ? target_grid : gs0.grid;
    const double s = std::sqrt(mp.one_minus_omega_sq());
    const double amp = std::pow(mp.one_minus_omega_sq(), 1.0 / (mp.p - 1.0));
    const auto Q0 = gs0.real_profile();
    const auto& g0 = *gs0.grid;
    std::vector<double> Q(grid->n);
    for (int i = 0; i < grid->n; ++i) {
        const double rr = s * grid->r[i];
        Q[i] = rr < g0.r_max - 3 * g0.h ? amp * interp_at(g0, Q0, rr) : 0.0;
        if (rr < g0.r[2]) Q[i] = amp * gs0.amplitude * std::pow(rr, mp.sigma);
        Q[i] = std::max(Q[i], 0.0);
    }
    if (s * grid->r_max < 0.5 * g0.r_max)
        throw numerical_error("rescaled profile undersamples the source grid");

    StencilSystem sys{*grid, mp};
    const double res = sys.newton(Q, 60, 1e-12);

    GroundState gs;
    gs.params = mp;
    gs.grid = grid;
    gs.profile = real_field(grid, Q);
    gs.amplitude = gs0.amplitude * amp * std::pow(s, mp.sigma);
    gs.residual = res;
    gs.method = "shoot";
    gs.record = make_record(gs.profile, mp);
    {
        auto gfine = make_grid(grid->d, grid->r_max, 2 * grid->n);
        std::vector<double> Qf(gfine->n);
        for (int i = 0; i < gfine->n; ++i) Qf[i] = interp_at(*grid, Q, gfine->r[i]);
        StencilSystem fsys{*gfine, mp};
        fsys.newton(Qf, 60, 1e-12);
        const auto ff = real_field(gfine, Qf);
        const double m = (4.0 * l2_sq(ff) - gs.record.mass) / 3.0;
        const double k = (4.0 * kinetic_gamma(ff, mp.gamma) - gs.record.kinetic) / 3.0;
        const double P = (4.0 * lp_pow(ff, mp.p + 1.0) - gs.record.potential) / 3.0;
        gs.record = record_from_scalars(mp, m, k, P);
    }
    gs.r_level = gs.record.S;
    return gs;
}

double lagrange_degeneracy_check(const GroundState& gs, const VirialIndex& idx) {
    const auto& mp = gs.params;
    const auto& rec = gs.record;
    const double d = mp.d, p = mp.p;
    double val;
    if (idx.alpha == d && idx.beta == 2.0) {
        val = -(p - 1) * d * ((p - 1) * d - 4.0) / (p + 1) * rec.potential;
    } else if (idx.alpha == 2.0 && idx.beta == p - 1.0) {
        val = -(p - 1) * (4.0 - d * (p - 1)) * rec.mass;
    } else if (idx.alpha == 0.0 && idx.beta == -1.0) {
        val = -2.0 * (d - 2) * rec.kinetic;
    } else {
        throw parameter_error("degeneracy table covers the three canonical indices only");
    }
    const bool degenerate_d2 = idx.beta == 2.0 && std::abs((p - 1) * d - 4.0) < 1e-12;
    if (!degenerate_d2 && idx.admissible(mp.d, mp.p) && !(val < 0.0))
        throw numerical_error("stationarity multiplier check lost strict negativity");
    return val;
}

MassCriticalCheck mass_critical_nu(const GroundState& gs, double cgn_estimate) {
    const auto& mp = gs.params;
    if (std::abs(mp.p - (1.0 + 4.0 / mp.d)) > 1e-9)
        throw parameter_error("mass_critical_nu requires p = 1 + 4/d");
    MassCriticalCheck out;
    out.r_level = gs.r_level;
    out.nu = std::sqrt(1.0 / ((mp.d + 2) * gs.r_level));
    out.closed_form = mp.one_minus_omega_sq() / 2.0 *
                      std::pow((mp.d + 2.0) / (mp.d * cgn_estimate), mp.d / 2.0);
    out.rel_mismatch = std::abs(out.r_level - out.closed_form) / out.closed_form;
    return out;
}

double probe_defect(const GroundState& gs) {
    const auto& g = *gs.grid;
    const auto& mp = gs.params;
    const auto Q = gs.real_profile();
    const double k2 = mp.one_minus_omega_sq();
    const double h = g.h;
    double worst = 0.0;
    // skip the origin corner and the far tail; 4th-order central differences
    const int i_lo = std::max(4, static_cast<int>(0.5 / h));
    const int i_hi = static_cast<int>(0.5 * g.n);
    for (int i = i_lo; i < i_hi; ++i) {
        const double d2 = (-Q[i - 2] + 16 * Q[i - 1] - 30 * Q[i] + 16 * Q[i + 1] - Q[i + 2]) /
                          (12 * h * h);
        const double d1 = (Q[i - 2] - 8 * Q[i - 1] + 8 * Q[i + 1] - Q[i + 2]) / (12 * h);
        const double F = d2 + (g.d - 1) / g.r[i] * d1 - mp.gamma / (g.r[i] * g.r[i]) * Q[i] -
                         k2 * Q[i] + std::pow(std::abs(Q[i]), mp.p - 1.0) * Q[i];
        worst = std::max(worst, std::abs(F));
    }
    return worst;
}

void save_ground_state(const GroundState& gs, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_field_csv(gs.profile, dir + "/profile.csv");
    std::ofstream rec(dir + "/record.json");
    rec << gs.record.to_json() << "\n";
    std::ofstream meta(dir + "/meta.json");
    meta.precision(17);
    meta << "{\"d\": " << gs.params.d << ", \"p\": " << gs.params.p
         << ", \"gamma\": " << gs.params.gamma << ", \"omega\": " << gs.params.omega
         << ", \"amplitude\": " << gs.amplitude << ", \"residual\": " << gs.residual
         << ", \"r_level\": " << gs.r_level << ", \"method\": \"" << gs.method << "\", \"grid\": "
         << grid_meta_json(*gs.grid) << "}\n";
}

}  // namespace nlkg
