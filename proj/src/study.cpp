#include "adfv/study.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace adfv {

CellField aggregate_to_coarse(const CellField& fine, const Mesh& coarse) {
    if (fine.mesh.cell_count() % coarse.cell_count() != 0 ||
        fine.mesh.half_length != coarse.half_length)
        throw std::invalid_argument("aggregate_to_coarse: meshes are not nested");
    const int ratio = fine.mesh.cell_count() / coarse.cell_count();
    CellField out(coarse);
    for (int i = 0; i < out.size(); ++i) {
        double s = 0.0;
        for (int j = 0; j < ratio; ++j) s += fine[i * ratio + j];
        out[i] = s / ratio;
    }
    return out;
}

namespace {

std::pair<double, double> field_errors(const CellField& a, const CellField& b) {
    CellField diff(a.mesh);
    for (int i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    return {lp_norm(diff, 1.0), lp_norm(diff, 2.0)};
}

}  // namespace

StudyResult refinement_study(const ModelSpec& model, const Mesh& base_mesh,
                             const TimeGrid& base_time, const SolverConfig& config, int levels,
                             const ReferenceFn* analytic, const std::string& reference_descr) {
    if (levels < 3) throw std::invalid_argument("refinement_study: need at least 3 levels");

    StudyResult result;
    result.reference = analytic ? "analytic: " + reference_descr : "finest";

    std::vector<CellField> finals;
    std::vector<Mesh> meshes;
    std::vector<double> dts;
    const int total = analytic ? levels : levels + 1;  // finest extra level as reference
    for (int l = 0; l < total; ++l) {
        const Mesh mesh = build_mesh(base_mesh.half_length, base_mesh.half_cells << l);
        const TimeGrid time = build_time_grid(base_time.horizon, base_time.intervals << l);
        try {
            RunResult run_result = run(model, mesh, time, config, time.intervals);
            finals.push_back(run_result.trajectory.snapshots.back());
        } catch (const SolverError& e) {
            throw SolverError("refinement level " + std::to_string(l) + ": " + e.what(),
                              e.residual_history());
        }
        meshes.push_back(mesh);
        dts.push_back(time.dt);
    }

    for (int l = 0; l < levels; ++l) {
        const CellField ref = analytic
                                  ? (*analytic)(meshes[static_cast<std::size_t>(l)],
                                                base_time.horizon)
                                  : aggregate_to_coarse(finals.back(),
                                                        meshes[static_cast<std::size_t>(l)]);
        StudyRow row;
        row.level = l;
        row.dx = meshes[static_cast<std::size_t>(l)].dx;
        row.dt = dts[static_cast<std::size_t>(l)];
        std::tie(row.error_l1, row.error_l2) =
            field_errors(finals[static_cast<std::size_t>(l)], ref);
        row.degenerate = row.error_l1 < 1e-14 && row.error_l2 < 1e-14;
        result.rows.push_back(row);
    }
    for (int l = 1; l < levels; ++l) {
        StudyRow& fine = result.rows[static_cast<std::size_t>(l)];
        const StudyRow& coarse = result.rows[static_cast<std::size_t>(l - 1)];
        if (fine.degenerate || coarse.degenerate) continue;  // eoc stays NaN
        fine.eoc_l1 = std::log2(coarse.error_l1 / fine.error_l1);
        fine.eoc_l2 = std::log2(coarse.error_l2 / fine.error_l2);
    }
    return result;
}

SteadyResult steady_state_run(const ModelSpec& model, const Mesh& mesh, double dt,
                              const SolverConfig& config, double t_max, double residual_tol,
                              const CellField* reference) {
    if (!(dt > 0.0) || !(t_max > 0.0))
        throw std::invalid_argument("steady_state_run: dt and t_max must be positive");

    const Discretization disc = discretize_model(model, mesh);
    SolverConfig step_config = config;
    step_config.dt = dt;
    step_config.rho_policy = model.policy;

    SteadyResult result;
    result.state = disc.initial;
    const int max_steps = static_cast<int>(std::ceil(t_max / dt - 1e-9));
    for (int n = 0; n < max_steps; ++n) {
        auto [next, report] = implicit_step(result.state, model, disc, step_config);
        result.step_residual = 0.0;
        for (int i = 0; i < next.size(); ++i)
            result.step_residual += std::abs(next[i] - result.state[i]) * mesh.dx;
        result.step_residual /= dt;
        result.state = std::move(next);
        result.steps = n + 1;
        result.time_reached = (n + 1) * dt;
        if (result.step_residual < residual_tol) {
            result.converged = true;
            break;
        }
    }
    if (reference) {
        double d = 0.0;
        for (int i = 0; i < result.state.size(); ++i)
            d += std::abs(result.state[i] - (*reference)[i]) * mesh.dx;
        result.distance = d;
    }
    return result;
}

}  // namespace adfv
