#include "nlkg/field_ops.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nlkg {

double l2_sq(const RadialField& f) {
    const auto& g = *f.grid;
    double s = 0.0;
    for (int i = 0; i < g.n; ++i) s += g.w[i] * std::norm(f.u[i]);
    return s;
}

double lp_pow(const RadialField& f, double q) {
    if (q < 1.0) throw parameter_error("lp_pow requires q >= 1");
    const auto& g = *f.grid;
    double s = 0.0;
    if (q == 2.0) return l2_sq(f);
    for (int i = 0; i < g.n; ++i) s += g.w[i] * std::pow(std::abs(f.u[i]), q);
    return s;
}

double l2_sq_tail(const RadialField& f, double R) {
    const auto& g = *f.grid;
    double s = 0.0;
    for (int i = 0; i < g.n; ++i)
        if (g.r[i] >= R) s += g.w[i] * std::norm(f.u[i]);
    return s;
}

double lp_pow_tail(const RadialField& f, double q, double R) {
    const auto& g = *f.grid;
    double s = 0.0;
    for (int i = 0; i < g.n; ++i)
        if (g.r[i] >= R) s += g.w[i] * std::pow(std::abs(f.u[i]), q);
    return s;
}

double grad_sq_tail(const RadialField& f, double R) {
    const auto& g = *f.grid;
    double s = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double rf = (i + 1.0) * g.h;  // face radius
        if (rf < R) continue;
        const cplx fp = (i + 1 < g.n) ? f.u[i + 1] : cplx{0.0, 0.0};
        s += g.flux_w[i] * std::norm((fp - f.u[i]) / g.h);
    }
    return s;
}

double kinetic_gamma(const RadialField& f, double gamma) {
    const auto& g = *f.grid;
    const double hd = (g.d - 2) / 2.0;
    if (!(gamma > -hd * hd))
        throw parameter_error("kinetic_gamma requires gamma > -((d-2)/2)^2");
    double grad = 0.0, inv = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const cplx fp = (i + 1 < g.n) ? f.u[i + 1] : cplx{0.0, 0.0};
        grad += g.flux_w[i] * std::norm((fp - f.u[i]) / g.h);
        inv += g.w[i] * std::norm(f.u[i]) / (g.r[i] * g.r[i]);
    }
    const double val = grad + gamma * inv;
    if (gamma < 0.0 && val < -1e-10 * (grad + std::abs(gamma) * inv))
        throw numerical_error("kinetic quadratic form lost positivity for gamma < 0");
    return val;
}

cplx kinetic_gamma_pairing(const RadialField& a, const RadialField& b, double gamma) {
    const auto& g = *a.grid;
    cplx s{0.0, 0.0};
    for (int i = 0; i < g.n; ++i) {
        const cplx ap = (i + 1 < g.n) ? a.u[i + 1] : cplx{0.0, 0.0};
        const cplx bp = (i + 1 < g.n) ? b.u[i + 1] : cplx{0.0, 0.0};
        s += g.flux_w[i] * ((ap - a.u[i]) / g.h) * std::conj((bp - b.u[i]) / g.h);
        s += gamma * g.w[i] * a.u[i] * std::conj(b.u[i]) / (g.r[i] * g.r[i]);
    }
    return s;
}

RadialField apply_laplacian_gamma(const RadialField& f, double gamma) {
    const auto& g = *f.grid;
    RadialField out(f.grid);
    const double inv_h2 = 1.0 / (g.h * g.h);
    for (int i = 0; i < g.n; ++i) {
        const cplx fp = (i + 1 < g.n) ? f.u[i + 1] : cplx{0.0, 0.0};
        const cplx flux_out = g.face_pow[i] * (fp - f.u[i]);
        const cplx flux_in = (i > 0) ? g.face_pow[i - 1] * (f.u[i] - f.u[i - 1]) : cplx{0.0, 0.0};
        const double rpow = std::pow(g.r[i], 1 - g.d);
        out.u[i] = rpow * (flux_out - flux_in) * inv_h2 - gamma * f.u[i] / (g.r[i] * g.r[i]);
    }
    return out;
}

std::vector<double> momentum(const StateSnapshot& s) {
    // Re \int \nabla u \bar v dx vanishes componentwise by radial symmetry.
    return std::vector<double>(s.u.grid->d, 0.0);
}

std::vector<cplx> radial_derivative(const RadialField& f) {
    const auto& g = *f.grid;
    const int n = g.n;
    std::vector<cplx> df(n);
    if (n < 3) throw parameter_error("radial_derivative needs n >= 3");
    const double ih2 = 1.0 / (2.0 * g.h);
    df[0] = (-3.0 * f.u[0] + 4.0 * f.u[1] - f.u[2]) * ih2;
    for (int i = 1; i + 1 < n; ++i) df[i] = (f.u[i + 1] - f.u[i - 1]) * ih2;
    df[n - 1] = (3.0 * f.u[n - 1] - 4.0 * f.u[n - 2] + f.u[n - 3]) * ih2;
    return df;
}

void write_field_csv(const RadialField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw numerical_error("cannot open " + path + " for writing");
    out << "r,re,im\n";
    char buf[128];
    const auto& g = *f.grid;
    for (int i = 0; i < g.n; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", g.r[i], f.u[i].real(),
                      f.u[i].imag());
        out << buf;
    }
}

RadialField read_field_csv(GridPtr g, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw numerical_error("cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    RadialField f(g);
    int i = 0;
    while (std::getline(in, line) && i < g->n) {
        double r, re, im;
        if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &r, &re, &im) != 3)
            throw numerical_error("malformed field CSV row: " + line);
        f.u[i++] = cplx{re, im};
    }
    if (i != g->n) throw numerical_error("field CSV row count does not match grid");
    return f;
}

std::string grid_meta_json(const RadialGrid& g) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"d\": " << g.d << ", \"h\": " << g.h << ", \"r_max\": " << g.r_max
       << ", \"n\": " << g.n << "}";
    return os.str();
}

}  // namespace nlkg
