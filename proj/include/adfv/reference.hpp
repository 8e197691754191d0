#pragma once

#include "adfv/grid.hpp"
#include "adfv/model.hpp"

namespace adfv {

/// Cosine-series solution of the Neumann heat problem on (-L,L) with the given
/// initial datum, returned as exact cell averages. The series is truncated so
/// that the neglected tail is below 1e-12.
CellField heat_neumann_solution(const ScalarFn& rho0, const Mesh& mesh, double t);

/// Continuum Gibbs state mass * e^{-V} / Z as cell averages.
CellField gibbs_steady(const Potential& V, const Mesh& mesh, double total_mass);

/// Discrete Gibbs state rho_i proportional to e^{-V_i} (V_i the discrete
/// potential), normalized to the given mass: the exact fixed point of the
/// scheme for the Boltzmann family with W = 0.
CellField discrete_gibbs_state(const CellField& discrete_V, double total_mass);

/// Barenblatt-type steady profile of the quadratic-diffusion model (H(s) = s^2)
/// under the confining potential x^2/2: rho(x) = max(0, (r^2 - x^2)/4) with the
/// support radius r fixed by the mass, r^3/3 = mass. Exact cell averages.
/// Errors out when the support reaches the domain boundary (the truncated
/// problem has a different steady state there).
CellField pme_barenblatt_steady(const Mesh& mesh, double total_mass);

}  // namespace adfv
