#pragma once

#include <string>

#include "nlkg/field_ops.hpp"
#include "nlkg/params.hpp"

namespace nlkg {

/// Every scalar the trajectory monitors and ground-state validators consume,
/// evaluated at one snapshot.  S, K and T are functions of (mass, kinetic,
/// potential) alone; E, C, L additionally involve the velocity field.
struct FunctionalRecord {
    double mass = 0.0;       ///< ||u||_{L^2}^2
    double kinetic = 0.0;    ///< ||(-Delta_gamma)^{1/2} u||_{L^2}^2
    double potential = 0.0;  ///< ||u||_{L^{p+1}}^{p+1}
    double S = 0.0;
    double E = 0.0;
    double C = 0.0;
    double L = 0.0;
    double K_d2 = 0.0;
    double K_2pm1 = 0.0;
    double K_0m1 = 0.0;
    double T_d2 = 0.0;
    double T_2pm1 = 0.0;
    double T_0m1 = 0.0;

    std::string to_json() const;
};

/// Coefficients of K^{a,b} on (mass, kinetic, potential):
/// K = (2a-db)(1-w^2)/2 m + (2a-(d-2)b)/2 k - ((p+1)a-db)/(p+1) P.
struct VirialCoeffs {
    double mass_c, kin_c, pot_c, mu_bar;
};
VirialCoeffs virial_coeffs(const ModelParams& mp, const VirialIndex& idx);

double action_S_of(const ModelParams& mp, double mass, double kinetic, double potential);
double virial_K_of(const ModelParams& mp, const VirialIndex& idx, double mass, double kinetic,
                   double potential);
double functional_T_of(const ModelParams& mp, const VirialIndex& idx, double mass, double kinetic,
                       double potential);

double action_S(const RadialField& f, const ModelParams& mp);

/// Derivative at lambda = 0 of S along e^{a l} f(e^{b l} .); idx must be admissible.
double virial_K(const RadialField& f, const ModelParams& mp, const VirialIndex& idx);

/// T^{a,b} = S - K^{a,b} / mu_bar.
double functional_T(const RadialField& f, const ModelParams& mp, const VirialIndex& idx);

struct EnergyCharge {
    double E, C;
};
EnergyCharge energy_charge(const StateSnapshot& s, const ModelParams& mp);

/// L = E + omega C; equals S(u) + ||v - i omega u||^2 / 2.
double functional_L(const StateSnapshot& s, const ModelParams& mp);

struct K1K {
    double K1, K;
};
/// K1 = ||u||^2 + kinetic - ||u||_{p+1}^{p+1} - ||v||^2;  K = K^{d,2} + q K1.
K1K functional_K1_K(const StateSnapshot& s, const ModelParams& mp);

/// Scale-invariant quotient J(f) = m^{(p+1-d(p-1)/2)/2} k^{d(p-1)/4} / P;
/// 1 / inf J estimates the sharp interpolation constant.
double gn_quotient(const RadialField& f, const ModelParams& mp);

/// Full record for a snapshot.
FunctionalRecord make_record(const StateSnapshot& s, const ModelParams& mp);
/// Record for a standing-wave pair (f, i omega f).
FunctionalRecord make_record(const RadialField& f, const ModelParams& mp);
/// Record assembled from already-known scalars (m, k, P) for the standing pair.
FunctionalRecord record_from_scalars(const ModelParams& mp, double mass, double kinetic,
                                     double potential);

}  // namespace nlkg
