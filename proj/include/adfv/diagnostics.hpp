#pragma once

#include <string>
#include <utility>
#include <vector>

#include "adfv/discretize.hpp"
#include "adfv/grid.hpp"
#include "adfv/model.hpp"
#include "adfv/solver.hpp"

namespace adfv {

/// Constants that parameterize the structural inequality checks.
/// Sup-norms are taken by dense sampling (2048 uniform points, V on [-L,L],
/// W on [-2L,2L]) and are therefore lower bounds on the true sup; the check
/// tolerances absorb the sampling error.
struct BoundConstants {
    double c_v1 = 0.0;   // ||V'||_inf + ||W'||_inf * ||rho0||_1
    double c_v2 = 0.0;   // ||V''||_inf + ||W''||_inf * ||rho0||_1
    double c_inf = 0.0;  // sup-norm envelope (1 - dt*c_v2)^{-n} * max rho0 at the horizon
};

BoundConstants bound_constants(const ModelSpec& model, const Mesh& mesh, double rho0_mass);
BoundConstants bound_constants(const ModelSpec& model, const Mesh& mesh, double rho0_mass,
                               const TimeGrid& time, double max_rho0);

struct InequalityReport {
    std::string name;
    bool holds = true;
    double slack = 0.0;  // min over all checks of RHS - LHS (tolerance included in RHS)
    double tolerance = 0.0;
    int worst_step = -1;  // time index of the tightest (or violating) check
    int worst_cell = -1;  // cell index when the check is cellwise, else -1
    bool skipped = false;
    std::string note;
};

/// E = sum_i (H(rho_i) + V_i rho_i + 1/2 (W*rho)_i rho_i) dx.
double discrete_energy(const CellField& rho, const CellField& discrete_V,
                       const KernelTable& kernel, const ModelSpec& model);

/// Energy monotone along the run: E(n+1) <= E(n) + 1e-10*(1 + |E(n)|).
InequalityReport dissipation_check(const std::vector<StepReport>& reports);

/// max rho^n <= (1 - dt*c_v2)^{-n} max rho^0 and
/// min rho^n >= (1 + dt*c_v2)^{-n} min rho^0, relative tolerance 1e-10.
/// Skipped (with a note) when dt*c_v2 >= 1: the bound needs that hypothesis.
InequalityReport linf_envelope_check(const Trajectory& traj, const BoundConstants& constants,
                                     double dt);

/// sum_f (|d_x V|^2 + |d_x (W*rho**)|^2) dx <= 2*L*c_v1^2 + 1e-10.
InequalityReport velocity_bound_check(const Discretization& disc, const CellField& rho_ss,
                                      const BoundConstants& constants);

/// Per-step flow interchange, default alpha = 1/2:
///   sum_i (K(rho^{n+1}) - K(rho^n)) dx/dt + (1-alpha) sum_f |d_x H'(rho^{n+1})|^2 dx
///     <= L*c_v1^2/alpha + tol.
/// For the Boltzmann family the K-based form degenerates and the quadratic
/// functional sum rho^2/2 dx takes its place, with the right-hand side scaled
/// by c_max^2/2 where c_max is the largest density along the run:
///   sum_i ((rho^{n+1})^2 - (rho^n)^2)/2 dx/dt + (1-alpha) sum_f |d_x rho^{n+1}|^2 dx
///     <= L*c_v1^2*c_max^2/(2*alpha) + tol.
/// tol = 1e-8*(1 + RHS), widened by an epsilon-proportional allowance when the
/// auxiliary functional is regularised (the exact inequality carries an O(eps)
/// remainder in that case). Requires a dense trajectory (every step stored).
InequalityReport flow_interchange_check(const Trajectory& traj, const ModelSpec& model,
                                        const AuxiliaryFunctional& aux,
                                        const BoundConstants& constants, double alpha = 0.5);

/// ||d_x H'(rho_h)||_{L^2(Q_T)} = sqrt(sum_n sum_f |d_x H'(rho^{n+1})|^2 dx dt).
double grad_H_l2(const Trajectory& traj, const ModelSpec& model);

/// Same with the density itself in place of H'(rho) (quadratic-functional path).
double grad_rho_l2(const Trajectory& traj);

enum class TranslateAxis { Time, Space };

/// Shift-continuity integrals of H'(rho_h) on the piecewise-constant
/// interpolation, computed exactly by splitting each shifted cell into the two
/// overlapped unshifted ones (no quadrature). Time axis:
///   int_0^{T-tau} int |H'(rho_h(t+tau,x)) - H'(rho_h(t,x))|^2 dx dt;
/// space axis is the x-shift analogue integrated over time. Shifts must lie in
/// (0,T) resp. (0,2L). Requires a dense trajectory.
std::vector<std::pair<double, double>> translate_scan(const Trajectory& traj,
                                                      const ModelSpec& model, TranslateAxis axis,
                                                      const std::vector<double>& shifts);

/// Smooth test function with both partial derivatives.
struct TestFunction {
    std::function<double(double, double)> phi;     // (t, x)
    std::function<double(double, double)> dt_phi;
    std::function<double(double, double)> dx_phi;
    std::string descr;
};

/// phi_k(t,x) = (1 - t/T) * cos(k*pi*(x+L)/(2L)); vanishes at t = T.
TestFunction cosine_test_function(int k, double T, double L);

/// Weak-form residual of the interpolated trajectory against phi:
///   eps = -int_0^T [ int rho_h dt_phi dx
///                    - int_{-L+dx/2}^{L-dx/2} rho_h dx_phi d_x(H'(rho_h)+V_h+(W*rho_h)_h) dx ] dt
///         - int rho_h(0,x) phi(0,x) dx.
/// phi-factor integrals use 3x3 Gauss points per space-time cell; rho_h on the
/// dual cell around a face carries the left cell value on the left half and the
/// right cell value on the right half. phi(T,.) = 0 is checked by sampling
/// (tolerance 1e-12). Requires a dense trajectory.
double weak_residual(const Trajectory& traj, const ModelSpec& model, const Discretization& disc,
                     const TestFunction& phi);

}  // namespace adfv
