#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "adfv/grid.hpp"
#include "adfv/model.hpp"
#include "adfv/solver.hpp"

namespace adfv {

/// Fully-resolved run description. `resolved` keeps the effective JSON (after
/// defaults and overrides) for reproducible run metadata.
struct RunConfig {
    Mesh mesh;
    TimeGrid time;
    ModelSpec model;
    SolverConfig solver;

    struct Diagnostics {
        bool enabled = true;
        double alpha = 0.5;    // flow-interchange weight, in (0,1)
        double epsilon = 0.0;  // auxiliary-functional regularisation; 0 = exact
    } diagnostics;

    struct Output {
        std::string directory = "out";
        int snapshot_cadence = 1;
        bool faces = false;  // also emit interface velocities/fluxes
    } output;

    std::string scenario;           // optional reference scenario name
    double steady_t_max = 20.0;     // steady subcommand horizon
    double steady_residual_tol = 1e-8;

    nlohmann::json resolved;
};

/// Parse and validate a config document. Schema (all keys lowercase):
///   domain { L, M }
///   time { T, N } or { T, dt }   -- exactly one of N/dt; N+1 steps are taken
///   model { energy { kind, ... }, V, W, rho0, policy }
///   solver { tol, max_outer_iters, damping }        (optional)
///   diagnostics { enabled, alpha, epsilon }          (optional)
///   output { directory, snapshot_cadence, faces }    (optional)
///   reference { scenario }                           (optional)
///   steady { t_max, residual_tol }                   (optional)
/// Potentials are an expression string, {"expr": ...}, or a builtin
/// {"name": zero|quadratic|double_well|gaussian|power_law|morse, ...params}.
/// rho0 is an expression string, {"expr": ...}, or
/// {"name": constant|gaussian_bump, ...params}.
/// Throws ConfigError with the offending key path.
RunConfig parse_config(const nlohmann::json& doc);

/// Read the file and parse it; JSON syntax errors are reported with location.
RunConfig load_config(const std::string& path);

/// Apply a dotted-path override "section.key=value" to a JSON document; the
/// value is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace adfv
