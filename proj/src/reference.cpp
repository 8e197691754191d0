#include "adfv/reference.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "adfv/quadrature.hpp"

namespace adfv {

namespace {

/// Composite 5-node Gauss integral over [a, b] with enough panels for f.
double composite_integral(const ScalarFn& f, double a, double b, int panels) {
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double x0 = a + (b - a) * p / panels;
        const double x1 = a + (b - a) * (p + 1) / panels;
        s += gauss5(f, x0, x1);
    }
    return s;
}

}  // namespace

CellField heat_neumann_solution(const ScalarFn& rho0, const Mesh& mesh, double t) {
    const double L = mesh.half_length;
    const double pi = std::acos(-1.0);

    const double a0 = composite_integral(rho0, -L, L, 256) / (2.0 * L);

    // a_k = (1/L) int rho0(x) cos(k*pi*(x+L)/(2L)) dx; the series is cut once
    // the damped coefficients stay below 1e-13 for several consecutive modes,
    // so the neglected tail is under 1e-12.
    std::vector<double> coeff;   // a_k for k = 1, 2, ...
    std::vector<double> lambda;  // decay rates (k*pi/(2L))^2
    int quiet = 0;
    for (int k = 1; k <= 4000 && quiet < 8; ++k) {
        const double omega = k * pi / (2.0 * L);
        const int panels = 64 + 4 * k;
        const double ak =
            composite_integral([&](double x) { return rho0(x) * std::cos(omega * (x + L)); }, -L,
                               L, panels) /
            L;
        coeff.push_back(ak);
        lambda.push_back(omega * omega);
        quiet = std::abs(ak) * std::exp(-omega * omega * t) < 1e-13 ? quiet + 1 : 0;
    }

    CellField out(mesh);
    for (int i = 0; i < out.size(); ++i) {
        const double xl = mesh.cell_left(i), xr = mesh.cell_right(i);
        double v = a0;
        for (std::size_t k = 0; k < coeff.size(); ++k) {
            const double omega = (static_cast<double>(k) + 1.0) * pi / (2.0 * L);
            // exact cell average of cos(omega*(x+L))
            const double avg =
                (std::sin(omega * (xr + L)) - std::sin(omega * (xl + L))) / (omega * mesh.dx);
            v += coeff[k] * std::exp(-lambda[k] * t) * avg;
        }
        out[i] = v;
    }
    return out;
}

CellField gibbs_steady(const Potential& V, const Mesh& mesh, double total_mass) {
    const double L = mesh.half_length;
    const ScalarFn density = [&](double x) { return std::exp(-V.f(x)); };
    const double Z = composite_integral(density, -L, L, 512);
    if (!(Z > 0.0) || !std::isfinite(Z))
        throw std::runtime_error("gibbs_steady: partition integral is not positive and finite");
    CellField out(mesh);
    for (int i = 0; i < out.size(); ++i)
        out[i] = total_mass / Z *
                 gauss5(density, mesh.cell_left(i), mesh.cell_right(i)) / mesh.dx;
    return out;
}

CellField discrete_gibbs_state(const CellField& discrete_V, double total_mass) {
    CellField out(discrete_V.mesh);
    for (int i = 0; i < out.size(); ++i) out[i] = std::exp(-discrete_V[i]);
    const double m = mass(out);
    for (int i = 0; i < out.size(); ++i) out[i] *= total_mass / m;
    return out;
}

CellField pme_barenblatt_steady(const Mesh& mesh, double total_mass) {
    if (!(total_mass > 0.0))
        throw std::invalid_argument("pme_barenblatt_steady: mass must be positive");
    // rho = (r^2 - x^2)/4 on (-r, r) integrates to r^3/3.
    const double r = std::cbrt(3.0 * total_mass);
    if (r >= mesh.half_length)
        throw std::runtime_error(
            "pme_barenblatt_steady: support radius " + std::to_string(r) +
            " reaches the boundary of (-L, L); enlarge the domain or reduce the mass");

    CellField out(mesh);
    for (int i = 0; i < out.size(); ++i) {
        const double a = std::max(mesh.cell_left(i), -r);
        const double b = std::min(mesh.cell_right(i), r);
        if (a >= b) {
            out[i] = 0.0;
            continue;
        }
        // exact integral of (r^2 - x^2)/4 over [a, b]
        const double integral = (r * r * (b - a) - (b * b * b - a * a * a) / 3.0) / 4.0;
        out[i] = integral / mesh.dx;
    }
    return out;
}

}  // namespace adfv
