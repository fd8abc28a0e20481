#pragma once

#include <string>
#include <vector>

#include "nlkg/functionals.hpp"
#include "nlkg/grid.hpp"

namespace nlkg {

enum class ShootClass { Crosses, Rebounds, Decays };

struct ShootResult {
    ShootClass cls = ShootClass::Decays;
    double r_end = 0.0;            ///< radius where integration stopped
    std::vector<double> at_nodes;  ///< profile sampled at grid nodes up to r_end (may be empty)
};

/// Integrates the radial profile equation outward from a series start at
/// eps0, classifying the shot by the undershoot/overshoot dichotomy.
/// When `grid` is non-null the solution is recorded at its nodes.
ShootResult shoot(const ModelParams& mp, double a, double r_end, const RadialGrid* grid = nullptr);

/// Validated stationary profile with its functional record.
struct GroundState {
    ModelParams params;
    GridPtr grid;
    RadialField profile;     ///< real positive samples
    double amplitude = 0.0;  ///< limit of r^{-sigma} Q at the origin (shooting parameter)
    double residual = 0.0;   ///< max-norm defect of the discretized profile equation
    FunctionalRecord record; ///< scalars refined by one internal grid doubling
    double r_level = 0.0;    ///< S(Q), the numerical minimization level
    std::string method;      ///< "shoot" or "minimize"

    std::vector<double> real_profile() const {
        std::vector<double> q(grid->n);
        for (int i = 0; i < grid->n; ++i) q[i] = profile.u[i].real();
        return q;
    }
};

struct SolveOptions {
    double tol_res = 1e-8;      ///< gate on the discrete-system defect
    double tol_K = 1e-4;        ///< relative sanity gate on the stationarity identities;
                                ///< desk-scale grids (n = 4096) land near 1e-7
    bool refine_record = true;  ///< refine record scalars on an internally doubled grid
    bool validate = true;
    int max_newton = 60;
};

/// Shooting + bisection + Newton polish on the grid's stencil.
GroundState find_ground_state(const ModelParams& mp, GridPtr grid, const SolveOptions& opts = {});

struct MinimizeOptions {
    int max_iter = 500;
    double grad_tol = 1e-10;  ///< preconditioned gradient norm, relative
};

/// Constrained descent: minimize T^{a,b} with the amplitude rescaling that
/// restores K^{a,b} = 0 after every step (verification path; slower than
/// shooting and never the default).
GroundState constrained_minimize_T(const ModelParams& mp, GridPtr grid, const VirialIndex& idx,
                                   const RadialField& seed, const MinimizeOptions& mo = {});

/// Maps a profile solved at omega = 0 to omega_new via the frequency scaling
/// Q_w(x) = (1-w^2)^{1/(p-1)} Q_0((1-w^2)^{1/2} x), then re-solves the
/// discrete system on the target grid from that seed.
GroundState rescale_omega(const GroundState& gs0, double omega_new, GridPtr target_grid = nullptr);

/// Closed-form value of <(K^{a,b})'(Q), D^{a,b} Q> at a stationarity point;
/// strictly negative inside the index's validity regime.
double lagrange_degeneracy_check(const GroundState& gs, const VirialIndex& idx);

struct MassCriticalCheck {
    double nu = 0.0;           ///< concentration scale, nu^2 = 1/((d+2) r^{d,2})
    double r_level = 0.0;
    double closed_form = 0.0;  ///< (1-w^2)/2 ((d+2)/(d C))^{d/2} with the supplied C
    double rel_mismatch = 0.0;
};
MassCriticalCheck mass_critical_nu(const GroundState& gs, double cgn_estimate);

/// Defect of the profile against an independent 4th-order probe stencil,
/// max-norm over interior nodes away from the origin corner and the far tail.
/// Converges at second order in h for the stencil-converged profile.
double probe_defect(const GroundState& gs);

/// Archive: profile.csv + record.json + meta.json under dir.
void save_ground_state(const GroundState& gs, const std::string& dir);

}  // namespace nlkg
