#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "adfv/config.hpp"
#include "adfv/diagnostics.hpp"
#include "adfv/grid.hpp"
#include "adfv/solver.hpp"
#include "adfv/study.hpp"

namespace adfv {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// "%.17g" rendering; round-trips doubles exactly.
std::string format_g17(double v);

/// Everything a finished run wants to persist.
struct RunArtifacts {
    Trajectory trajectory;
    std::vector<StepReport> reports;
    BoundConstants constants;
    std::vector<InequalityReport> checks;
    nlohmann::json extras;  // study tables, steady-state summaries, ...
    double wall_seconds = 0.0;
};

nlohmann::json step_report_json(const StepReport& r);
nlohmann::json inequality_json(const InequalityReport& r);
nlohmann::json bound_constants_json(const BoundConstants& c);
nlohmann::json study_json(const StudyResult& s);

/// Columns n,t,i,x_i,rho; n is the 0-based time index, i the 1-based cell.
void write_snapshots_csv(const std::string& path, const Trajectory& traj);

/// Columns n,i_half,u,F with the interface velocities and fluxes recomputed
/// from each stored snapshot; i_half = 1 .. 2M-1 labels interior interfaces.
void write_faces_csv(const std::string& path, const Trajectory& traj, const ModelSpec& model,
                     const Discretization& disc);

/// Re-read a snapshots.csv into a trajectory (for post-hoc diagnostics).
Trajectory read_snapshots_csv(const std::string& path, const Mesh& mesh, const TimeGrid& time);

/// Write snapshots.csv, faces.csv (if configured), diagnostics.json, and
/// run.json into the configured output directory, creating it if needed.
/// With diagnostics disabled, diagnostics.json carries the constants only.
void emit_outputs(const RunArtifacts& artifacts, const RunConfig& cfg, const Discretization& disc,
                  bool diagnostics_enabled);

}  // namespace adfv
