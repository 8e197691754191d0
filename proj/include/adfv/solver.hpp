#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "adfv/discretize.hpp"
#include "adfv/grid.hpp"
#include "adfv/model.hpp"

namespace adfv {

/// Everything a time step needs besides the current density: the mesh, the
/// discrete external potential V_i, the interaction kernel table, and the
/// discretized initial datum.
struct Discretization {
    Mesh mesh;
    CellField initial;
    CellField potential;
    KernelTable kernel;
    bool interaction = false;  // false when the kernel is identically zero
};

Discretization discretize_model(const ModelSpec& model, const Mesh& mesh);

struct SolverConfig {
    double tol = 1e-10;
    int max_outer_iters = 200;
    double damping = 1.0;  // initial omega; halved on stagnation down to 1/16
    double dt = 0.0;       // set by run() from the time grid when 0
    RhoStarStarPolicy rho_policy = RhoStarStarPolicy::Midpoint;
};

struct StepReport {
    int step = 0;  // time index n of the step n -> n+1
    int outer_iters = 0;
    double final_residual = 0.0;   // sup-norm of successive Picard iterates
    double scheme_residual = 0.0;  // sup-norm residual of the fully-coupled scheme
    double mass_before = 0.0;
    double mass_after = 0.0;
    double energy_before = 0.0;
    double energy_after = 0.0;
    double min_density = 0.0;
    double max_density = 0.0;
    double dissipation_slack = 0.0;  // energy_before - energy_after
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::vector<double> residual_history)
        : std::runtime_error(what), residual_history_(std::move(residual_history)) {}
    const std::vector<double>& residual_history() const { return residual_history_; }

private:
    std::vector<double> residual_history_;
};

/// xi_i = H'(rho_i) + V_i + (W * rho**)_i.
CellField entropy_variables(const CellField& rho, const CellField& rho_ss, const ModelSpec& model,
                            const Discretization& disc);

/// u = -d_x xi at interior interfaces.
FaceField velocities(const CellField& xi);

/// F_{i+1/2} = rho_i * u+ + rho_{i+1} * u-, zero at the boundary interfaces.
FaceField upwind_flux(const CellField& rho, const FaceField& u);

/// Solve theta_i + (dt/dx)(F_{i+1/2} - F_{i-1/2}) = rho_i with the velocities
/// frozen and the flux densities implicit: a tridiagonal M-matrix system with
/// unit column sums, so mass is conserved exactly and nonnegativity of rho
/// propagates to theta.
CellField transport_solve(const CellField& rho_n, const FaceField& u, double dt);

/// One implicit step by damped Picard iteration over the frozen-velocity
/// transport solve; the returned field is the last transport_solve output.
std::pair<CellField, StepReport> implicit_step(const CellField& rho_n, const ModelSpec& model,
                                               const Discretization& disc,
                                               const SolverConfig& config);

struct RunResult {
    Trajectory trajectory;
    std::vector<StepReport> reports;
};

/// March the scheme over the whole time grid, storing every `snapshot_cadence`-th
/// state (plus the initial and final ones).
RunResult run(const ModelSpec& model, const Mesh& mesh, const TimeGrid& time,
              SolverConfig config, int snapshot_cadence = 1);

RunResult run(const ModelSpec& model, const Discretization& disc, const TimeGrid& time,
              SolverConfig config, int snapshot_cadence = 1);

}  // namespace adfv
