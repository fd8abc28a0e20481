#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace nlkg {

/// Exit-code-relevant error categories.
struct parameter_error : std::domain_error {
    using std::domain_error::domain_error;
};
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Scaling-family exponent pair (alpha, beta) used by the virial functionals.
/// Admissibility: alpha >= 0, 2a - d b >= 0, 2a - (d-2) b > 0,
/// (p-1) a - 2 b >= 0 and (a,b) != (0,0).
struct VirialIndex {
    double alpha = 0.0;
    double beta = 0.0;

    static VirialIndex d2(int d) { return {static_cast<double>(d), 2.0}; }
    static VirialIndex two_pm1(double p) { return {2.0, p - 1.0}; }
    static VirialIndex zero_m1() { return {0.0, -1.0}; }

    bool admissible(int d, double p) const {
        const double a = alpha, b = beta;
        if (a == 0.0 && b == 0.0) return false;
        if (a < 0.0) return false;
        if (2 * a - d * b < 0.0) return false;
        if (2 * a - (d - 2) * b <= 0.0) return false;
        if ((p - 1) * a - 2 * b < 0.0) return false;
        return true;
    }

    void validate(int d, double p) const {
        if (!admissible(d, p))
            throw parameter_error("virial index (" + std::to_string(alpha) + "," +
                                  std::to_string(beta) +
                                  ") violates the admissibility constraints at d=" +
                                  std::to_string(d) + ", p=" + std::to_string(p));
    }
};

/// Model parameters (d, p, gamma, omega) with the derived constants used
/// throughout: the indicial root of the inverse-square operator, the critical
/// frequency omega_c, and q = 4/(p-1) - d.
struct ModelParams {
    int d = 3;
    double p = 3.0;
    double gamma = 1.0;
    double omega = 0.0;

    double rho = 0.0;                  ///< (d-2)/2 - sqrt(((d-2)/2)^2 + gamma)
    double sigma = 0.0;                ///< -rho; leading power of regular profiles at r=0
    double q = 0.0;                    ///< 4/(p-1) - d
    std::optional<double> omega_c{};   ///< sqrt((p-1)/(4-(d-1)(p-1))) when defined

    double one_minus_omega_sq() const { return 1.0 - omega * omega; }
    bool mass_subcritical() const { return p < 1.0 + 4.0 / d; }
    bool mass_supercritical_or_critical() const { return !mass_subcritical(); }

    /// Normalization constant of T^{a,b}: (p+1)a - d b for b >= 0, else 2a - d b.
    double mu_bar(const VirialIndex& idx) const {
        return idx.beta >= 0.0 ? (p + 1.0) * idx.alpha - d * idx.beta
                               : 2.0 * idx.alpha - d * idx.beta;
    }
};

/// Validates ranges and fills the derived constants.
/// gamma > -((d-2)/2)^2 is the operator bound; the ground-state and
/// stability machinery additionally require gamma >= 0, checked at call sites.
inline ModelParams make_params(int d, double p, double gamma, double omega) {
    if (d < 3) throw parameter_error("dimension d must satisfy d >= 3");
    if (!(p > 1.0)) throw parameter_error("exponent p must satisfy p > 1");
    if (!(p <= 1.0 + 4.0 / (d - 2) + 1e-12))
        throw parameter_error("exponent p must satisfy p <= 1 + 4/(d-2)");
    const double hd = (d - 2) / 2.0;
    if (!(gamma > -hd * hd))
        throw parameter_error("coupling gamma must satisfy gamma > -((d-2)/2)^2");
    if (!(1.0 - omega * omega > 0.0))
        throw parameter_error("frequency omega must satisfy 1 - omega^2 > 0");

    ModelParams mp;
    mp.d = d;
    mp.p = p;
    mp.gamma = gamma;
    mp.omega = omega;
    mp.rho = hd - std::sqrt(hd * hd + gamma);
    mp.sigma = -mp.rho;
    mp.q = 4.0 / (p - 1.0) - d;
    const double denom = 4.0 - (d - 1) * (p - 1.0);
    if (denom > 0.0) mp.omega_c = std::sqrt((p - 1.0) / denom);
    return mp;
}

}  // namespace nlkg
