#include "adfv/output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace adfv {

namespace {

using nlohmann::json;

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // fixed '\n' line endings everywhere
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json step_report_json(const StepReport& r) {
    return json{{"step", r.step},
                {"outer_iters", r.outer_iters},
                {"final_residual", r.final_residual},
                {"scheme_residual", r.scheme_residual},
                {"mass_before", r.mass_before},
                {"mass_after", r.mass_after},
                {"energy_before", r.energy_before},
                {"energy_after", r.energy_after},
                {"min_density", r.min_density},
                {"max_density", r.max_density},
                {"dissipation_slack", r.dissipation_slack}};
}

json inequality_json(const InequalityReport& r) {
    json j{{"name", r.name},
           {"holds", r.holds},
           {"slack", r.slack},
           {"tolerance", r.tolerance},
           {"skipped", r.skipped}};
    if (r.worst_step >= 0) j["worst_step"] = r.worst_step;
    if (r.worst_cell >= 0) j["worst_cell"] = r.worst_cell;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

json bound_constants_json(const BoundConstants& c) {
    return json{{"c_v1", c.c_v1}, {"c_v2", c.c_v2}, {"c_inf", c.c_inf}};
}

json study_json(const StudyResult& s) {
    json rows = json::array();
    for (const StudyRow& r : s.rows) {
        json row{{"level", r.level},
                 {"dx", r.dx},
                 {"dt", r.dt},
                 {"error_l1", r.error_l1},
                 {"error_l2", r.error_l2},
                 {"degenerate", r.degenerate}};
        // NaN is not representable in JSON; eoc is simply absent on such rows.
        if (std::isfinite(r.eoc_l1)) row["eoc_l1"] = r.eoc_l1;
        if (std::isfinite(r.eoc_l2)) row["eoc_l2"] = r.eoc_l2;
        rows.push_back(std::move(row));
    }
    return json{{"reference", s.reference}, {"rows", std::move(rows)}};
}

void write_snapshots_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out = open_for_write(path);
    out << "n,t,i,x_i,rho\n";
    for (int k = 0; k < traj.count(); ++k) {
        const int n = traj.snapshot_steps[static_cast<std::size_t>(k)];
        const double t = n * traj.time.dt;
        const CellField& rho = traj.at(k);
        for (int i = 0; i < rho.size(); ++i)
            out << n << ',' << format_g17(t) << ',' << i + 1 << ','
                << format_g17(rho.mesh.cell_center(i)) << ',' << format_g17(rho[i]) << '\n';
    }
    finish_write(out, path);
}

void write_faces_csv(const std::string& path, const Trajectory& traj, const ModelSpec& model,
                     const Discretization& disc) {
    std::ofstream out = open_for_write(path);
    out << "n,i_half,u,F\n";
    for (int k = 0; k < traj.count(); ++k) {
        const int n = traj.snapshot_steps[static_cast<std::size_t>(k)];
        const CellField& rho = traj.at(k);
        const FaceField u = velocities(entropy_variables(rho, rho, model, disc));
        const FaceField flux = upwind_flux(rho, u);
        for (int f = 0; f < u.size(); ++f)
            out << n << ',' << f + 1 << ',' << format_g17(u[f]) << ',' << format_g17(flux[f])
                << '\n';
    }
    finish_write(out, path);
}

Trajectory read_snapshots_csv(const std::string& path, const Mesh& mesh, const TimeGrid& time) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");

    Trajectory traj;
    traj.time = time;
    std::string line;
    if (!std::getline(in, line) || line.rfind("n,t,i", 0) != 0)
        throw IoError("'" + path + "': missing snapshots header");

    int current = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        int n = 0, i = 0;
        double t = 0.0, x = 0.0, rho = 0.0;
        char c1, c2, c3, c4;
        if (!(row >> n >> c1 >> t >> c2 >> i >> c3 >> x >> c4 >> rho))
            throw IoError("'" + path + "': malformed row '" + line + "'");
        if (n != current) {
            traj.snapshot_steps.push_back(n);
            traj.snapshots.emplace_back(mesh);
            current = n;
        }
        if (i < 1 || i > mesh.cell_count())
            throw IoError("'" + path + "': cell index " + std::to_string(i) + " out of range");
        traj.snapshots.back()[i - 1] = rho;
    }
    if (traj.snapshots.empty()) throw IoError("'" + path + "': no snapshot rows");
    return traj;
}

void emit_outputs(const RunArtifacts& artifacts, const RunConfig& cfg, const Discretization& disc,
                  bool diagnostics_enabled) {
    namespace fs = std::filesystem;
    const fs::path dir = cfg.output.directory;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

    write_snapshots_csv((dir / "snapshots.csv").string(), artifacts.trajectory);
    if (cfg.output.faces)
        write_faces_csv((dir / "faces.csv").string(), artifacts.trajectory, cfg.model, disc);

    json diag{{"constants", bound_constants_json(artifacts.constants)}};
    if (diagnostics_enabled) {
        json steps = json::array();
        for (const StepReport& r : artifacts.reports) steps.push_back(step_report_json(r));
        diag["steps"] = std::move(steps);
        json checks = json::array();
        for (const InequalityReport& r : artifacts.checks) checks.push_back(inequality_json(r));
        diag["checks"] = std::move(checks);
        if (!artifacts.extras.is_null()) diag["extras"] = artifacts.extras;
    }
    {
        const std::string path = (dir / "diagnostics.json").string();
        std::ofstream out = open_for_write(path);
        out << diag.dump(2) << '\n';
        finish_write(out, path);
    }
    {
        json run{{"config", cfg.resolved},
                 {"version", "1.0.0"},
                 {"compiler", __VERSION__},
                 {"wall_seconds", artifacts.wall_seconds}};
        const std::string path = (dir / "run.json").string();
        std::ofstream out = open_for_write(path);
        out << run.dump(2) << '\n';
        finish_write(out, path);
    }
}

}  // namespace adfv
