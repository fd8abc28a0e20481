#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlkg/functionals.hpp"
#include "nlkg/ground_state.hpp"
#include "nlkg/grid.hpp"

namespace nlkg {

/// Truncation weights for the localized virial quantities.
/// Phi_R(r) = d on [0,R], 0 beyond 2R, quintic-smoothstep transition;
/// Psi_R(r) = r^{1-d} \int_0^r s^{d-1} Phi_R(s) ds, so that
/// Psi' + (d-1)/r Psi = Phi holds identically and Psi' <= 1.
struct WeightPair {
    double R = 0.0;
    GridPtr grid;
    std::vector<double> Phi;
    std::vector<double> Psi;
    std::vector<double> PsiPrime;  ///< Phi - (d-1) Psi / r, the exact derivative
    double C0_est = 0.0;           ///< a-priori bound for the remainder constant
};

WeightPair build_weights(GridPtr grid, double R);

/// Psi_R at an arbitrary radius via the defining integral (fine quadrature).
double psi_weight_at(int d, double R, double r, int subdiv = 4096);

struct VirialI {
    double I1, I2;
};
/// I1 = 2 Re \int Psi_R u_r \bar v + Re \int Phi_R u \bar v;  I2 = I1 + q Re \int u \bar v.
VirialI virial_I(const StateSnapshot& s, const WeightPair& w, const ModelParams& mp);

/// Distance to the phase orbit {(e^{i t} Q, i w e^{i t} Q)} in H^1_gamma x L^2,
/// minimized over the phase in closed form.
double orbit_distance(const StateSnapshot& s, const GroundState& gs);

/// Time series of everything the audits consume.
struct TrajectoryRecord {
    std::vector<double> t;
    std::vector<FunctionalRecord> rec;
    std::vector<double> h1;          ///< sqrt(mass + kinetic + ||v||^2)
    std::vector<double> v_sq;        ///< ||v||^2
    std::vector<double> fprime;      ///< 2 Re <u, v>
    std::vector<double> orbit_dist;  ///< present when a reference profile is registered
    std::vector<double> I1, I2;      ///< per registered weight pair (flattened: run index major)
    std::vector<double> tail_pot;    ///< ||u||_{L^{p+1}(r >= R)}^{p+1} per weight pair
    int n_weights = 0;               ///< number of registered weight pairs
    bool has_orbit = false;

    void write_csv(const std::string& path) const;
};

/// Monitors attached to an evolution run.
struct MonitorSet {
    ModelParams params;
    const GroundState* reference = nullptr;   ///< enables orbit_dist
    std::vector<WeightPair> weights;          ///< enables I1/I2/tail columns
};

struct AuditCheck {
    std::string name;
    std::string status;  ///< "pass" | "fail" | "info"
    double worst_t = 0.0;
    double worst_value = 0.0;
    double tolerance = 0.0;
};

struct AuditReport {
    std::string name;
    std::vector<AuditCheck> checks;
    double C0_est = 0.0;

    bool all_pass() const {
        for (const auto& c : checks)
            if (c.status == "fail") return false;
        return true;
    }
    std::string to_json() const;
};

/// Truncation audit for the virial derivative: measures
/// rho(t) = (-dI1/dt) - K^{d,2}(u) - d(p-1)/(p+1) ||u||^{p+1}_{L^{p+1}(r>=R)}
/// and fits the remainder constant sup rho R^2 / mass; the constant must stay
/// bounded under R-doubling.  Requires a record with two weight pairs (R, 2R).
AuditReport lemma82_audit(const TrajectoryRecord& traj, const ModelParams& mp,
                          const std::vector<double>& radii);

/// The f(t) = ||u||^2 differential-inequality chain for global solutions:
/// second-difference identity, plateau bound, [.]_+ monotonicity, the f'
/// two-sided bounds and the windowed integral bounds; flags negative energy.
/// With global_hypothesis = false (pre-blow-up window of a non-global run)
/// the bound checks degrade to informational status.
AuditReport section4_audit(const TrajectoryRecord& traj, const ModelParams& mp,
                           bool global_hypothesis = true);

enum class MarginRegime { MassSuper, MassSub };

/// Blow-up margin for data (lambda Q, i lambda w Q), lambda > 1: the invariant
/// -set gap that lower-bounds the virial derivative along the flow.
double margin_delta(const GroundState& gs, double lambda, MarginRegime regime);

}  // namespace nlkg
