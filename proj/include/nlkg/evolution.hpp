#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "nlkg/ground_state.hpp"
#include "nlkg/monitors.hpp"

namespace nlkg {

/// Time-integration controls.  dt obeys dt <= cfl h and the origin-stiffness
/// guard dt <= cfl h / (2 sqrt(max(gamma, 1))).
struct EvolutionConfig {
    double cfl = 0.4;
    double t_end = 20.0;
    double blowup_h1_factor = 1e3;
    double blowup_amp = 1e6;
    double sample_spacing = 0.01;       ///< target spacing between monitor samples
    std::optional<long> monitor_stride{};  ///< explicit steps between samples
    std::optional<double> dt{};         ///< explicit step; validated against the cfl rule

    double step_size(const RadialGrid& g, double gamma) const {
        const double guard = cfl * g.h / (2.0 * std::sqrt(std::max(gamma, 1.0)));
        const double auto_dt = std::min(cfl * g.h, guard);
        if (!dt) return auto_dt;
        if (*dt > cfl * g.h + 1e-15 || *dt > guard + 1e-15)
            throw parameter_error("explicit dt violates the cfl/origin-stiffness rule");
        return *dt;
    }
};

struct Verdict {
    enum class Kind { GlobalBounded, BlowUp, Undecided } kind = Kind::Undecided;
    double t_star = 0.0;    ///< trigger time for BlowUp
    std::string trigger;    ///< "h1" | "amp" | "nonfinite"
    double sup_h1 = 0.0;
    double t_end = 0.0;

    std::string to_json() const;
};

/// One kick-drift-kick update of u_tt = Delta_gamma u - u + |u|^{p-1} u.
/// Time-reversible and second-order; conserves the discrete charge exactly.
StateSnapshot step(const StateSnapshot& s, const ModelParams& mp, double dt);

/// Integrates to t_end or a blow-up trigger, sampling all registered monitors.
std::pair<TrajectoryRecord, Verdict> evolve(const StateSnapshot& init, const ModelParams& mp,
                                            const EvolutionConfig& cfg, const MonitorSet& mon);

/// (lambda Q, i lambda w Q) at t = 0.
StateSnapshot make_lambda_data(const GroundState& gs, double lambda);

/// (Q + d n1/||n1||_{H^1_gamma}, i w Q + d n2/||n2||_{L^2}) with seeded smooth
/// random bumps; sits at H^1 x L^2 distance sqrt(2) delta from the standing pair.
StateSnapshot make_perturbed_data(const GroundState& gs, double delta, std::uint64_t seed);

}  // namespace nlkg
