#pragma once

#include <functional>
#include <string>
#include <vector>

#include "adfv/grid.hpp"
#include "adfv/model.hpp"
#include "adfv/solver.hpp"

namespace adfv {

struct StudyRow {
    int level = 0;
    double dx = 0.0;
    double dt = 0.0;
    double error_l1 = 0.0;
    double error_l2 = 0.0;
    double eoc_l1 = std::numeric_limits<double>::quiet_NaN();  // defined from the 2nd row on
    double eoc_l2 = std::numeric_limits<double>::quiet_NaN();
    bool degenerate = false;  // errors at rounding level, eoc meaningless
};

struct StudyResult {
    std::vector<StudyRow> rows;
    std::string reference;  // "analytic: <descr>" or "finest"
};

/// Reference profile evaluated as cell averages on a given mesh at time t.
using ReferenceFn = std::function<CellField(const Mesh&, double)>;

/// Average a fine-mesh field onto a coarser mesh whose cell count divides the
/// fine one; plain averaging over child cells, so mass is conserved exactly.
CellField aggregate_to_coarse(const CellField& fine, const Mesh& coarse);

/// Joint-refinement convergence study: level l runs on (dx/2^l, dt/2^l), the
/// ratio dx/dt held fixed. Errors are discrete L1/L2 distances to the
/// reference at the final time; eoc = log2(e_l / e_{l+1}) is attached to the
/// finer row. With no analytic reference the finest level serves as reference
/// (and gets no error row of its own). Levels with errors at rounding level
/// are flagged degenerate and report NaN eoc.
StudyResult refinement_study(const ModelSpec& model, const Mesh& base_mesh,
                             const TimeGrid& base_time, const SolverConfig& config, int levels,
                             const ReferenceFn* analytic, const std::string& reference_descr);

struct SteadyResult {
    CellField state;
    double time_reached = 0.0;
    double step_residual = 0.0;  // ||rho^{n+1} - rho^n||_1 / dt at the last step
    bool converged = false;
    double distance = std::numeric_limits<double>::quiet_NaN();  // L1 gap to the reference
    int steps = 0;
};

/// March the scheme until ||rho^{n+1} - rho^n||_1 / dt < residual_tol or
/// t >= t_max. Reaching t_max without meeting the tolerance is reported via
/// the converged flag, not an error.
SteadyResult steady_state_run(const ModelSpec& model, const Mesh& mesh, double dt,
                              const SolverConfig& config, double t_max, double residual_tol,
                              const CellField* reference);

}  // namespace adfv
