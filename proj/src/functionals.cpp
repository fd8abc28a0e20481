#include "nlkg/functionals.hpp"

#include <cmath>
#include <sstream>

namespace nlkg {

VirialCoeffs virial_coeffs(const ModelParams& mp, const VirialIndex& idx) {
    const double a = idx.alpha, b = idx.beta, d = mp.d, p = mp.p;
    VirialCoeffs c{};
    c.mass_c = (2 * a - d * b) * mp.one_minus_omega_sq() / 2.0;
    c.kin_c = (2 * a - (d - 2) * b) / 2.0;
    c.pot_c = -((p + 1) * a - d * b) / (p + 1);
    c.mu_bar = mp.mu_bar(idx);
    return c;
}

double action_S_of(const ModelParams& mp, double m, double k, double P) {
    return mp.one_minus_omega_sq() / 2.0 * m + 0.5 * k - P / (mp.p + 1.0);
}

double virial_K_of(const ModelParams& mp, const VirialIndex& idx, double m, double k, double P) {
    const auto c = virial_coeffs(mp, idx);
    return c.mass_c * m + c.kin_c * k + c.pot_c * P;
}

double functional_T_of(const ModelParams& mp, const VirialIndex& idx, double m, double k,
                       double P) {
    return action_S_of(mp, m, k, P) - virial_K_of(mp, idx, m, k, P) / mp.mu_bar(idx);
}

double action_S(const RadialField& f, const ModelParams& mp) {
    return action_S_of(mp, l2_sq(f), kinetic_gamma(f, mp.gamma), lp_pow(f, mp.p + 1.0));
}

double virial_K(const RadialField& f, const ModelParams& mp, const VirialIndex& idx) {
    idx.validate(mp.d, mp.p);
    return virial_K_of(mp, idx, l2_sq(f), kinetic_gamma(f, mp.gamma), lp_pow(f, mp.p + 1.0));
}

double functional_T(const RadialField& f, const ModelParams& mp, const VirialIndex& idx) {
    idx.validate(mp.d, mp.p);
    return functional_T_of(mp, idx, l2_sq(f), kinetic_gamma(f, mp.gamma), lp_pow(f, mp.p + 1.0));
}

EnergyCharge energy_charge(const StateSnapshot& s, const ModelParams& mp) {
    const double m = l2_sq(s.u);
    const double k = kinetic_gamma(s.u, mp.gamma);
    const double P = lp_pow(s.u, mp.p + 1.0);
    const double vv = l2_sq(s.v);
    double C = 0.0;
    const auto& g = *s.u.grid;
    for (int i = 0; i < g.n; ++i) C += g.w[i] * std::imag(s.u.u[i] * std::conj(s.v.u[i]));
    return {0.5 * k + 0.5 * m - P / (mp.p + 1.0) + 0.5 * vv, C};
}

double functional_L(const StateSnapshot& s, const ModelParams& mp) {
    const auto ec = energy_charge(s, mp);
    return ec.E + mp.omega * ec.C;
}

K1K functional_K1_K(const StateSnapshot& s, const ModelParams& mp) {
    const double m = l2_sq(s.u);
    const double k = kinetic_gamma(s.u, mp.gamma);
    const double P = lp_pow(s.u, mp.p + 1.0);
    const double vv = l2_sq(s.v);
    const double K1 = m + k - P - vv;
    const double Kd2 = virial_K_of(mp, VirialIndex::d2(mp.d), m, k, P);
    return {K1, Kd2 + mp.q * K1};
}

double gn_quotient(const RadialField& f, const ModelParams& mp) {
    const double m = l2_sq(f);
    const double k = kinetic_gamma(f, mp.gamma);
    const double P = lp_pow(f, mp.p + 1.0);
    if (!(P > 0.0)) throw parameter_error("gn_quotient requires a nonzero field");
    const double em = (mp.p + 1.0 - mp.d * (mp.p - 1.0) / 2.0) / 2.0;
    const double ek = mp.d * (mp.p - 1.0) / 4.0;
    return std::pow(m, em) * std::pow(k, ek) / P;
}

FunctionalRecord record_from_scalars(const ModelParams& mp, double m, double k, double P) {
    FunctionalRecord r;
    r.mass = m;
    r.kinetic = k;
    r.potential = P;
    r.S = action_S_of(mp, m, k, P);
    r.K_d2 = virial_K_of(mp, VirialIndex::d2(mp.d), m, k, P);
    r.K_2pm1 = virial_K_of(mp, VirialIndex::two_pm1(mp.p), m, k, P);
    r.K_0m1 = virial_K_of(mp, VirialIndex::zero_m1(), m, k, P);
    r.T_d2 = functional_T_of(mp, VirialIndex::d2(mp.d), m, k, P);
    r.T_2pm1 = functional_T_of(mp, VirialIndex::two_pm1(mp.p), m, k, P);
    r.T_0m1 = functional_T_of(mp, VirialIndex::zero_m1(), m, k, P);
    // standing pair (u, i omega u): C = -omega m, E = S - omega^2 m + omega^2 m/2 ... assembled directly
    r.C = -mp.omega * m;
    r.E = 0.5 * k + 0.5 * m - P / (mp.p + 1.0) + 0.5 * mp.omega * mp.omega * m;
    r.L = r.E + mp.omega * r.C;
    return r;
}

FunctionalRecord make_record(const StateSnapshot& s, const ModelParams& mp) {
    FunctionalRecord r = record_from_scalars(mp, l2_sq(s.u), kinetic_gamma(s.u, mp.gamma),
                                             lp_pow(s.u, mp.p + 1.0));
    const auto ec = energy_charge(s, mp);
    r.E = ec.E;
    r.C = ec.C;
    r.L = r.E + mp.omega * r.C;
    return r;
}

FunctionalRecord make_record(const RadialField& f, const ModelParams& mp) {
    return record_from_scalars(mp, l2_sq(f), kinetic_gamma(f, mp.gamma), lp_pow(f, mp.p + 1.0));
}

std::string FunctionalRecord::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"mass\": " << mass << ", \"kinetic\": " << kinetic << ", \"potential\": " << potential
       << ", \"S\": " << S << ", \"E\": " << E << ", \"C\": " << C << ", \"L\": " << L
       << ", \"K_d2\": " << K_d2 << ", \"K_2pm1\": " << K_2pm1 << ", \"K_0m1\": " << K_0m1
       << ", \"T_d2\": " << T_d2 << ", \"T_2pm1\": " << T_2pm1 << ", \"T_0m1\": " << T_0m1 << "}";
    return os.str();
}

}  // namespace nlkg
