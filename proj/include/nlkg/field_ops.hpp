#pragma once

#include <string>
#include <vector>

#include "nlkg/grid.hpp"

namespace nlkg {

/// \sum w_i |u_i|^2
double l2_sq(const RadialField& f);

/// \sum w_i |u_i|^q, q >= 1
double lp_pow(const RadialField& f, double q);

/// Tail norms over r >= R (weights masked, no regridding).
double l2_sq_tail(const RadialField& f, double R);
double lp_pow_tail(const RadialField& f, double q, double R);
double grad_sq_tail(const RadialField& f, double R);

/// Quadratic form of -Delta_gamma: flux-difference gradient energy plus the
/// inverse-square term.  Exactly matches -Re<apply_laplacian_gamma(f), f> for
/// fields with f_N = 0 (discrete integration by parts).
double kinetic_gamma(const RadialField& f, double gamma);

/// Sesquilinear version of the same form, <a, b>_{\dot H^1_gamma}.
cplx kinetic_gamma_pairing(const RadialField& a, const RadialField& b, double gamma);

/// Conservative 3-point stencil for Delta_gamma = Delta - gamma/|x|^2 with
/// zero inner flux at the origin face and Dirichlet at r_max.
RadialField apply_laplacian_gamma(const RadialField& f, double gamma);

/// Linear momentum of a radial snapshot: identically the zero d-vector.
std::vector<double> momentum(const StateSnapshot& s);

/// Node-centered radial derivative: centered in the interior, one-sided
/// second-order at the first and last node.
std::vector<cplx> radial_derivative(const RadialField& f);

/// CSV serialization, header "r,re,im", 17 significant digits.
void write_field_csv(const RadialField& f, const std::string& path);
RadialField read_field_csv(GridPtr g, const std::string& path);

/// Grid metadata JSON {d, h, r_max, n}.
std::string grid_meta_json(const RadialGrid& g);

}  // namespace nlkg
