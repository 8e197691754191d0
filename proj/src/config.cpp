#include "adfv/config.hpp"

#include <cmath>
#include <fstream>

#include "adfv/expr.hpp"

namespace adfv {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config key '" + path + "': " + what);
}

const json& require(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing");
    return *it;
}

double number_at(const json& obj, const std::string& path, const std::string& key) {
    const json& v = require(obj, path, key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

double number_or(const json& obj, const std::string& path, const std::string& key, double fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    return number_at(obj, path, key);
}

int integer_at(const json& obj, const std::string& path, const std::string& key) {
    const json& v = require(obj, path, key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<int>();
}

std::string string_at(const json& obj, const std::string& path, const std::string& key) {
    const json& v = require(obj, path, key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

Potential parse_potential(const json& spec, const std::string& path) {
    try {
        if (spec.is_string()) return expression_potential(spec.get<std::string>());
        if (!spec.is_object()) fail(path, "expected an expression string or an object");
        if (spec.contains("expr")) {
            const std::string src = string_at(spec, path, "expr");
            if (spec.contains("d1"))
                return expression_potential(src, string_at(spec, path, "d1"));
            return expression_potential(src);
        }
        const std::string name = string_at(spec, path, "name");
        if (name == "zero") return zero_potential();
        if (name == "quadratic") return quadratic_potential(number_or(spec, path, "a", 1.0));
        if (name == "double_well") return double_well_potential();
        if (name == "gaussian")
            return gaussian_potential(number_or(spec, path, "a", 1.0),
                                      number_or(spec, path, "sigma", 1.0));
        if (name == "power_law")
            return power_law_potential(number_at(spec, path, "a"), number_at(spec, path, "b"));
        if (name == "morse")
            return morse_potential(number_or(spec, path, "cr", 1.0),
                                   number_or(spec, path, "lr", 0.5),
                                   number_or(spec, path, "ca", 1.0),
                                   number_or(spec, path, "la", 2.0));
        fail(path + ".name",
             "unknown potential '" + name +
                 "' (expected zero|quadratic|double_well|gaussian|power_law|morse)");
    } catch (const ParseError& e) {
        fail(path, std::string("expression error: ") + e.what());
    }
}

std::pair<ScalarFn, std::string> parse_datum(const json& spec, const std::string& path) {
    try {
        if (spec.is_string()) {
            Expression e = parse_expression(spec.get<std::string>());
            return {[e](double x) { return e.eval(x); }, spec.get<std::string>()};
        }
        if (!spec.is_object()) fail(path, "expected an expression string or an object");
        if (spec.contains("expr")) {
            const std::string src = string_at(spec, path, "expr");
            Expression e = parse_expression(src);
            return {[e](double x) { return e.eval(x); }, src};
        }
        const std::string name = string_at(spec, path, "name");
        if (name == "constant") {
            const double c = number_at(spec, path, "value");
            return {[c](double) { return c; }, "constant " + std::to_string(c)};
        }
        if (name == "gaussian_bump") {
            const double a = number_or(spec, path, "amplitude", 1.0);
            const double sigma = number_or(spec, path, "sigma", 0.3);
            const double floor = number_or(spec, path, "floor", 0.0);
            return {[=](double x) { return a * std::exp(-x * x / (2 * sigma * sigma)) + floor; },
                    "gaussian bump a=" + std::to_string(a) + " sigma=" + std::to_string(sigma) +
                        " floor=" + std::to_string(floor)};
        }
        fail(path + ".name", "unknown datum '" + name + "' (expected constant|gaussian_bump)");
    } catch (const ParseError& e) {
        fail(path, std::string("expression error: ") + e.what());
    }
}

EnergyFamily parse_energy(const json& spec, const std::string& path) {
    const std::string kind = string_at(spec, path, "kind");
    if (kind == "porous_medium") return porous_medium_energy(number_at(spec, path, "m"));
    if (kind == "boltzmann") return boltzmann_energy();
    if (kind == "custom")
        return custom_energy(string_at(spec, path, "h"), string_at(spec, path, "hp"),
                             string_at(spec, path, "hpp"));
    fail(path + ".kind",
         "unknown energy '" + kind + "' (expected porous_medium|boltzmann|custom)");
}

}  // namespace

RunConfig parse_config(const json& doc) {
    RunConfig cfg;
    cfg.resolved = doc;

    const json& domain = require(doc, "", "domain");
    cfg.mesh = build_mesh(number_at(domain, "domain", "L"), integer_at(domain, "domain", "M"));

    const json& time = require(doc, "", "time");
    const double T = number_at(time, "time", "T");
    const bool has_n = time.contains("N"), has_dt = time.contains("dt");
    if (has_n == has_dt) fail("time", "exactly one of N and dt must be given");
    if (has_n) {
        cfg.time = build_time_grid(T, integer_at(time, "time", "N") + 1);
    } else {
        const double dt = number_at(time, "time", "dt");
        if (!(dt > 0.0)) fail("time.dt", "must be positive");
        const double ratio = T / dt;
        const int intervals = static_cast<int>(std::lround(ratio));
        if (intervals < 1 || std::abs(ratio - intervals) > 1e-9 * ratio)
            fail("time.dt", "must divide the horizon T into an integer number of steps");
        cfg.time = build_time_grid(T, intervals);
    }

    const json& model = require(doc, "", "model");
    EnergyFamily energy = parse_energy(require(model, "model", "energy"), "model.energy");
    PotentialSpec potentials;
    if (model.contains("V")) potentials.V = parse_potential(model.at("V"), "model.V");
    if (model.contains("W")) potentials.W = parse_potential(model.at("W"), "model.W");
    auto [rho0, rho0_descr] = parse_datum(require(model, "model", "rho0"), "model.rho0");
    const RhoStarStarPolicy policy =
        model.contains("policy") ? rho_policy_from_string(string_at(model, "model", "policy"))
                                 : RhoStarStarPolicy::Midpoint;
    cfg.model = make_model(std::move(energy), std::move(potentials), std::move(rho0),
                           std::move(rho0_descr), policy);

    if (doc.contains("solver")) {
        const json& solver = doc.at("solver");
        cfg.solver.tol = number_or(solver, "solver", "tol", cfg.solver.tol);
        if (solver.contains("max_outer_iters"))
            cfg.solver.max_outer_iters = integer_at(solver, "solver", "max_outer_iters");
        cfg.solver.damping = number_or(solver, "solver", "damping", cfg.solver.damping);
        if (!(cfg.solver.tol > 0.0)) fail("solver.tol", "must be positive");
        if (cfg.solver.max_outer_iters < 1) fail("solver.max_outer_iters", "must be positive");
        if (!(cfg.solver.damping > 0.0 && cfg.solver.damping <= 1.0))
            fail("solver.damping", "must lie in (0, 1]");
    }
    cfg.solver.rho_policy = cfg.model.policy;

    if (doc.contains("diagnostics")) {
        const json& diag = doc.at("diagnostics");
        if (diag.contains("enabled")) {
            if (!diag.at("enabled").is_boolean()) fail("diagnostics.enabled", "expected a boolean");
            cfg.diagnostics.enabled = diag.at("enabled").get<bool>();
        }
        cfg.diagnostics.alpha = number_or(diag, "diagnostics", "alpha", cfg.diagnostics.alpha);
        cfg.diagnostics.epsilon =
            number_or(diag, "diagnostics", "epsilon", cfg.diagnostics.epsilon);
        if (!(cfg.diagnostics.alpha > 0.0 && cfg.diagnostics.alpha < 1.0))
            fail("diagnostics.alpha", "must lie in (0, 1)");
        if (cfg.diagnostics.epsilon < 0.0) fail("diagnostics.epsilon", "must be nonnegative");
    }

    if (doc.contains("output")) {
        const json& out = doc.at("output");
        if (out.contains("directory"))
            cfg.output.directory = string_at(out, "output", "directory");
        if (out.contains("snapshot_cadence")) {
            cfg.output.snapshot_cadence = integer_at(out, "output", "snapshot_cadence");
            if (cfg.output.snapshot_cadence < 1)
                fail("output.snapshot_cadence", "must be positive");
        }
        if (out.contains("faces")) {
            if (!out.at("faces").is_boolean()) fail("output.faces", "expected a boolean");
            cfg.output.faces = out.at("faces").get<bool>();
        }
    }

    if (doc.contains("reference"))
        cfg.scenario = string_at(doc.at("reference"), "reference", "scenario");
    if (doc.contains("steady")) {
        const json& steady = doc.at("steady");
        cfg.steady_t_max = number_or(steady, "steady", "t_max", cfg.steady_t_max);
        cfg.steady_residual_tol =
            number_or(steady, "steady", "residual_tol", cfg.steady_residual_tol);
        if (!(cfg.steady_t_max > 0.0)) fail("steady.t_max", "must be positive");
        if (!(cfg.steady_residual_tol > 0.0)) fail("steady.residual_tol", "must be positive");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    return parse_config(doc);
}

void apply_override(nlohmann::json& doc, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + assignment + "' must have the form path.key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;  // bare strings stay strings
    }

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty())
            throw ConfigError("override '" + assignment + "' has an empty path segment");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

}  // namespace adfv
