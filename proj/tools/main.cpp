#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adfv/config.hpp"
#include "adfv/diagnostics.hpp"
#include "adfv/expr.hpp"
#include "adfv/output.hpp"
#include "adfv/reference.hpp"
#include "adfv/solver.hpp"
#include "adfv/study.hpp"

namespace {

using namespace adfv;
using nlohmann::json;

constexpr const char* kOutputDirEnv = "ADFV_OUTPUT_DIR";

RunConfig load_with_overrides(const std::string& path, const std::vector<std::string>& sets) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    for (const std::string& s : sets) apply_override(doc, s);
    RunConfig cfg = parse_config(doc);
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) cfg.output.directory = dir;
    return cfg;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// The structural checks shared by `run` and `check`. Flow interchange needs
/// every step stored; it is reported as skipped otherwise.
std::vector<InequalityReport> trajectory_checks(const RunConfig& cfg, const Discretization& disc,
                                                const Trajectory& traj,
                                                const BoundConstants& constants, bool dense) {
    std::vector<InequalityReport> checks;
    checks.push_back(linf_envelope_check(traj, constants, cfg.time.dt));
    checks.push_back(velocity_bound_check(disc, traj.snapshots.back(), constants));

    InequalityReport fi;
    fi.name = "flow_interchange";
    if (!dense) {
        fi.skipped = true;
        fi.note = "needs snapshot_cadence 1";
    } else {
        try {
            AuxiliaryFunctional aux;  // unused for the quadratic (Boltzmann) variant
            if (cfg.model.energy.kind != EnergyKind::Boltzmann)
                aux = build_auxiliary(cfg.model.energy, cfg.diagnostics.epsilon);
            fi = flow_interchange_check(traj, cfg.model, aux, constants, cfg.diagnostics.alpha);
        } catch (const ConfigError& e) {
            fi.skipped = true;
            fi.note = e.what();
        }
    }
    checks.push_back(fi);
    return checks;
}

int cmd_run(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const Discretization disc = discretize_model(cfg.model, cfg.mesh);
    const RunResult result =
        run(cfg.model, disc, cfg.time, cfg.solver, cfg.output.snapshot_cadence);

    RunArtifacts art;
    art.trajectory = result.trajectory;
    art.reports = result.reports;
    const double mass0 = mass(disc.initial);
    const double max0 =
        *std::max_element(disc.initial.values.begin(), disc.initial.values.end());
    art.constants = bound_constants(cfg.model, cfg.mesh, mass0, cfg.time, max0);

    if (cfg.diagnostics.enabled) {
        art.checks.push_back(dissipation_check(art.reports));
        const bool dense = cfg.output.snapshot_cadence == 1;
        for (auto& c : trajectory_checks(cfg, disc, art.trajectory, art.constants, dense))
            art.checks.push_back(std::move(c));
        if (dense) {
            art.extras["grad_H_l2"] = grad_H_l2(art.trajectory, cfg.model);
            art.extras["grad_rho_l2"] = grad_rho_l2(art.trajectory);
        }
    }
    art.wall_seconds = seconds_since(t0);
    emit_outputs(art, cfg, disc, cfg.diagnostics.enabled);

    bool all_hold = true;
    for (const auto& c : art.checks) all_hold = all_hold && (c.holds || c.skipped);
    std::cout << "run: " << cfg.time.intervals << " steps, mass "
              << format_g17(mass(art.trajectory.snapshots.back())) << ", checks "
              << (all_hold ? "ok" : "VIOLATED") << ", output " << cfg.output.directory << "\n";
    return 0;
}

int cmd_check(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    const Discretization disc = discretize_model(cfg.model, cfg.mesh);
    const fs::path dir = cfg.output.directory;
    const Trajectory traj =
        read_snapshots_csv((dir / "snapshots.csv").string(), cfg.mesh, cfg.time);

    const double mass0 = mass(traj.snapshots.front());
    const double max0 = *std::max_element(traj.snapshots.front().values.begin(),
                                          traj.snapshots.front().values.end());
    const BoundConstants constants = bound_constants(cfg.model, cfg.mesh, mass0, cfg.time, max0);
    bool dense = true;
    for (int k = 0; k < traj.count(); ++k)
        dense = dense && traj.snapshot_steps[static_cast<std::size_t>(k)] == k;

    json diag{{"constants", bound_constants_json(constants)}};
    json checks = json::array();
    bool all_hold = true;
    for (const auto& c : trajectory_checks(cfg, disc, traj, constants, dense)) {
        checks.push_back(inequality_json(c));
        all_hold = all_hold && (c.holds || c.skipped);
        std::cout << "check " << c.name << ": "
                  << (c.skipped ? "skipped" : c.holds ? "holds" : "VIOLATED") << "\n";
    }
    diag["checks"] = std::move(checks);

    const std::string path = (dir / "diagnostics.json").string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << diag.dump(2) << '\n';
    if (!out.flush()) throw IoError("write failed for '" + path + "'");
    return all_hold ? 0 : 1;
}

ReferenceFn make_reference(const RunConfig& cfg) {
    const double mass0 = [&] {
        const CellField rho0 = discretize_initial(cfg.model.initial_datum, cfg.mesh);
        return mass(rho0);
    }();
    if (cfg.scenario == "heat_neumann") {
        const ScalarFn rho0 = cfg.model.initial_datum;
        return [rho0](const Mesh& mesh, double t) { return heat_neumann_solution(rho0, mesh, t); };
    }
    if (cfg.scenario == "gibbs_steady") {
        const Potential V = cfg.model.potentials.V;
        return [V, mass0](const Mesh& mesh, double) { return gibbs_steady(V, mesh, mass0); };
    }
    if (cfg.scenario == "pme_barenblatt_steady")
        return [mass0](const Mesh& mesh, double) { return pme_barenblatt_steady(mesh, mass0); };
    throw ConfigError("reference.scenario '" + cfg.scenario +
                      "' unknown (expected heat_neumann|gibbs_steady|pme_barenblatt_steady)");
}

int cmd_study(const RunConfig& cfg, int levels, const std::string& reference) {
    StudyResult result;
    if (reference == "analytic") {
        if (cfg.scenario.empty())
            throw ConfigError("study --reference analytic needs reference.scenario in the config");
        const ReferenceFn ref = make_reference(cfg);
        result = refinement_study(cfg.model, cfg.mesh, cfg.time, cfg.solver, levels, &ref,
                                  cfg.scenario);
    } else if (reference == "finest") {
        result =
            refinement_study(cfg.model, cfg.mesh, cfg.time, cfg.solver, levels, nullptr, "");
    } else {
        throw ConfigError("--reference must be analytic or finest");
    }

    std::cout << "level        dx        dt     error_L1     error_L2   eoc_L1   eoc_L2\n";
    for (const StudyRow& r : result.rows) {
        std::printf("%5d %9.3e %9.3e %12.5e %12.5e %8.3f %8.3f%s\n", r.level, r.dx, r.dt,
                    r.error_l1, r.error_l2, r.eoc_l1, r.eoc_l2,
                    r.degenerate ? "  (degenerate)" : "");
    }

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.output.directory, ec);
    if (ec)
        throw IoError("cannot create output directory '" + cfg.output.directory +
                      "': " + ec.message());
    const std::string path = (fs::path(cfg.output.directory) / "study.json").string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << study_json(result).dump(2) << '\n';
    if (!out.flush()) throw IoError("write failed for '" + path + "'");
    return 0;
}

int cmd_steady(const RunConfig& cfg) {
    CellField reference;
    bool have_reference = false;
    if (!cfg.scenario.empty()) {
        reference = make_reference(cfg)(cfg.mesh, cfg.steady_t_max);
        if (cfg.scenario == "gibbs_steady") {
            // The scheme's exact fixed point uses the discrete potential.
            const CellField v = discretize_potential(cfg.model.potentials.V, cfg.mesh);
            reference = discrete_gibbs_state(v, mass(reference));
        }
        have_reference = true;
    }

    const SteadyResult result =
        steady_state_run(cfg.model, cfg.mesh, cfg.time.dt, cfg.solver, cfg.steady_t_max,
                         cfg.steady_residual_tol, have_reference ? &reference : nullptr);

    std::cout << "steady: " << (result.converged ? "converged" : "not converged") << " after "
              << result.steps << " steps (t = " << format_g17(result.time_reached)
              << "), step residual " << format_g17(result.step_residual);
    if (have_reference) std::cout << ", L1 distance " << format_g17(result.distance);
    std::cout << "\n";

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.output.directory, ec);
    if (ec)
        throw IoError("cannot create output directory '" + cfg.output.directory +
                      "': " + ec.message());
    json summary{{"converged", result.converged},
                 {"steps", result.steps},
                 {"time_reached", result.time_reached},
                 {"step_residual", result.step_residual}};
    if (have_reference) summary["l1_distance"] = result.distance;
    const std::string path = (fs::path(cfg.output.directory) / "steady.json").string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << summary.dump(2) << '\n';
    if (!out.flush()) throw IoError("write failed for '" + path + "'");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Implicit upwind finite-volume solver for aggregation-diffusion equations"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    int levels = 3;
    std::string reference = "analytic";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "JSON config file")->required();
        sub->add_option("--set", sets, "override a config key, e.g. --set time.dt=0.001");
    };
    CLI::App* run_cmd = app.add_subcommand("run", "run the scheme and emit outputs");
    add_common(run_cmd);
    CLI::App* study_cmd = app.add_subcommand("study", "joint-refinement convergence study");
    add_common(study_cmd);
    study_cmd->add_option("--levels", levels, "number of refinement levels (>= 3)");
    study_cmd->add_option("--reference", reference, "error reference: analytic|finest");
    CLI::App* steady_cmd = app.add_subcommand("steady", "march to a steady state");
    add_common(steady_cmd);
    CLI::App* check_cmd = app.add_subcommand("check", "diagnostics on an existing snapshots.csv");
    add_common(check_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig cfg = load_with_overrides(config_path, sets);
        if (run_cmd->parsed()) return cmd_run(cfg);
        if (study_cmd->parsed()) return cmd_study(cfg, levels, reference);
        if (steady_cmd->parsed()) return cmd_steady(cfg);
        return cmd_check(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
