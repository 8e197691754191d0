#include "adfv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "adfv/quadrature.hpp"

namespace adfv {

namespace {

double sampled_sup(const ScalarFn& f, double a, double b) {
    constexpr int kSamples = 2048;
    double sup = 0.0;
    for (int k = 0; k < kSamples; ++k) {
        const double x = a + (b - a) * k / (kSamples - 1);
        sup = std::max(sup, std::abs(f(x)));
    }
    return sup;
}

/// Fail unless every step of the run was stored (snapshot_steps = 0,1,2,...).
void require_dense(const Trajectory& traj, const char* who) {
    for (int k = 0; k < traj.count(); ++k)
        if (traj.snapshot_steps[static_cast<std::size_t>(k)] != k)
            throw std::invalid_argument(std::string(who) +
                                        ": needs a trajectory with every step stored "
                                        "(snapshot cadence 1)");
}

template <typename F>
double gauss33(F&& f, double t0, double t1, double a, double b) {
    const double tm = 0.5 * (t0 + t1), th = 0.5 * (t1 - t0);
    const double xm = 0.5 * (a + b), xh = 0.5 * (b - a);
    double s = 0.0;
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
            s += kGauss3Weights[p] * kGauss3Weights[q] *
                 f(tm + th * kGauss3Nodes[p], xm + xh * kGauss3Nodes[q]);
    return s * th * xh;
}

}  // namespace

BoundConstants bound_constants(const ModelSpec& model, const Mesh& mesh, double rho0_mass) {
    const double L = mesh.half_length;
    BoundConstants c;
    c.c_v1 = sampled_sup(model.potentials.V.d1, -L, L) +
             sampled_sup(model.potentials.W.d1, -2 * L, 2 * L) * rho0_mass;
    c.c_v2 = sampled_sup(model.potentials.V.d2, -L, L) +
             sampled_sup(model.potentials.W.d2, -2 * L, 2 * L) * rho0_mass;
    return c;
}

BoundConstants bound_constants(const ModelSpec& model, const Mesh& mesh, double rho0_mass,
                               const TimeGrid& time, double max_rho0) {
    BoundConstants c = bound_constants(model, mesh, rho0_mass);
    const double q = time.dt * c.c_v2;
    c.c_inf = q < 1.0 ? std::pow(1.0 - q, -time.intervals) * max_rho0
                      : std::numeric_limits<double>::infinity();
    return c;
}

double discrete_energy(const CellField& rho, const CellField& discrete_V,
                       const KernelTable& kernel, const ModelSpec& model) {
    const double dx = rho.mesh.dx;
    std::vector<double> terms(static_cast<std::size_t>(rho.size()));
    if (kernel.is_zero()) {
        for (int i = 0; i < rho.size(); ++i)
            terms[static_cast<std::size_t>(i)] =
                (model.energy.H(rho[i]) + discrete_V[i] * rho[i]) * dx;
    } else {
        const CellField w_conv = convolve(kernel, rho);
        for (int i = 0; i < rho.size(); ++i)
            terms[static_cast<std::size_t>(i)] =
                (model.energy.H(rho[i]) + discrete_V[i] * rho[i] + 0.5 * w_conv[i] * rho[i]) * dx;
    }
    return compensated_sum(terms);
}

InequalityReport dissipation_check(const std::vector<StepReport>& reports) {
    InequalityReport r;
    r.name = "energy_dissipation";
    r.slack = std::numeric_limits<double>::infinity();
    for (const StepReport& s : reports) {
        const double tol = 1e-10 * (1.0 + std::abs(s.energy_before));
        const double slack = s.energy_before + tol - s.energy_after;
        if (slack < r.slack) {
            r.slack = slack;
            r.worst_step = s.step;
            r.tolerance = tol;
        }
        if (slack < 0.0) r.holds = false;
    }
    if (reports.empty()) r.slack = 0.0;
    return r;
}

InequalityReport linf_envelope_check(const Trajectory& traj, const BoundConstants& constants,
                                     double dt) {
    InequalityReport r;
    r.name = "linf_envelope";
    const double q = dt * constants.c_v2;
    if (q >= 1.0) {
        r.skipped = true;
        r.note = "dt * c_v2 >= 1: the envelope bound does not apply at this step size";
        return r;
    }
    if (traj.count() == 0) return r;

    const auto& rho0 = traj.at(0).values;
    const double max0 = *std::max_element(rho0.begin(), rho0.end());
    const double min0 = *std::min_element(rho0.begin(), rho0.end());
    r.slack = std::numeric_limits<double>::infinity();
    for (int k = 1; k < traj.count(); ++k) {
        const int n = traj.snapshot_steps[static_cast<std::size_t>(k)];
        const auto& v = traj.at(k).values;
        const double hi = *std::max_element(v.begin(), v.end());
        const double lo = *std::min_element(v.begin(), v.end());
        const double upper = std::pow(1.0 - q, -n) * max0;
        const double lower = std::pow(1.0 + q, -n) * min0;
        const double tol_hi = 1e-10 * (1.0 + std::abs(upper));
        const double tol_lo = 1e-10 * (1.0 + std::abs(lower));
        const double slack = std::min(upper + tol_hi - hi, lo - (lower - tol_lo));
        if (slack < r.slack) {
            r.slack = slack;
            r.worst_step = n;
            r.tolerance = std::min(tol_hi, tol_lo);
        }
        if (slack < 0.0) r.holds = false;
    }
    return r;
}

InequalityReport velocity_bound_check(const Discretization& disc, const CellField& rho_ss,
                                      const BoundConstants& constants) {
    InequalityReport r;
    r.name = "velocity_bound";
    const double dx = disc.mesh.dx;

    const FaceField gv = face_gradient(disc.potential);
    double lhs = 0.0;
    for (int f = 0; f < gv.size(); ++f) lhs += gv[f] * gv[f] * dx;
    if (disc.interaction) {
        const FaceField gw = face_gradient(convolve(disc.kernel, rho_ss));
        for (int f = 0; f < gw.size(); ++f) lhs += gw[f] * gw[f] * dx;
    }
    const double rhs = 2.0 * disc.mesh.half_length * constants.c_v1 * constants.c_v1;
    r.tolerance = 1e-10 * (1.0 + rhs);
    r.slack = rhs + r.tolerance - lhs;
    r.holds = r.slack >= 0.0;
    return r;
}

InequalityReport flow_interchange_check(const Trajectory& traj, const ModelSpec& model,
                                        const AuxiliaryFunctional& aux,
                                        const BoundConstants& constants, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("flow_interchange_check: alpha must lie in (0,1)");
    require_dense(traj, "flow_interchange_check");

    InequalityReport r;
    const double L = traj.at(0).mesh.half_length;
    const double dx = traj.at(0).mesh.dx;
    const double dt = traj.time.dt;
    const bool quadratic = model.energy.kind == EnergyKind::Boltzmann;
    r.name = quadratic ? "flow_interchange_quadratic" : "flow_interchange";

    double rhs = L * constants.c_v1 * constants.c_v1 / alpha;
    if (quadratic) {
        double c_max = 0.0;
        for (int k = 0; k < traj.count(); ++k)
            for (double v : traj.at(k).values) c_max = std::max(c_max, v);
        rhs *= 0.5 * c_max * c_max;
    }
    r.tolerance = 1e-8 * (1.0 + std::abs(rhs));
    if (!quadratic && aux.epsilon > 0.0)
        // The regularised functional satisfies the bound only up to an O(eps)
        // remainder; widen the allowance proportionally.
        r.tolerance += aux.epsilon * (1.0 + std::abs(rhs));

    auto value = [&](double s) -> double {
        const double v = quadratic ? 0.5 * s * s : aux.K(s);
        if (!std::isfinite(v))
            throw ConfigError("flow_interchange_check: auxiliary functional undefined at density " +
                              std::to_string(s) + "; enable epsilon regularisation");
        return v;
    };

    r.slack = std::numeric_limits<double>::infinity();
    for (int k = 0; k + 1 < traj.count(); ++k) {
        const CellField& prev = traj.at(k);
        const CellField& next = traj.at(k + 1);
        double rate = 0.0;
        for (int i = 0; i < prev.size(); ++i) rate += (value(next[i]) - value(prev[i])) * dx;
        rate /= dt;

        const CellField g = [&] {
            if (quadratic) return next;
            CellField h(next.mesh);
            for (int i = 0; i < next.size(); ++i) h[i] = model.energy.Hp(next[i]);
            return h;
        }();
        const FaceField grad = face_gradient(g);
        double diss = 0.0;
        for (int f = 0; f < grad.size(); ++f) diss += grad[f] * grad[f] * dx;

        const double slack = rhs + r.tolerance - (rate + (1.0 - alpha) * diss);
        if (slack < r.slack) {
            r.slack = slack;
            r.worst_step = k;
        }
        if (slack < 0.0) r.holds = false;
    }
    if (traj.count() < 2) r.slack = 0.0;
    return r;
}

namespace {

/// sqrt(sum over steps of dt * sum_f |d_x g(rho^{n+1})|^2 dx) for g applied cellwise.
double space_time_grad_l2(const Trajectory& traj, const std::function<double(double)>& g) {
    double total = 0.0;
    for (int k = 1; k < traj.count(); ++k) {
        const CellField& rho = traj.at(k);
        const double weight =
            (traj.snapshot_steps[static_cast<std::size_t>(k)] -
             traj.snapshot_steps[static_cast<std::size_t>(k - 1)]) * traj.time.dt;
        CellField h(rho.mesh);
        for (int i = 0; i < rho.size(); ++i) h[i] = g(rho[i]);
        const FaceField grad = face_gradient(h);
        double s = 0.0;
        for (int f = 0; f < grad.size(); ++f) s += grad[f] * grad[f];
        total += s * rho.mesh.dx * weight;
    }
    return std::sqrt(total);
}

}  // namespace

double grad_H_l2(const Trajectory& traj, const ModelSpec& model) {
    return space_time_grad_l2(traj, model.energy.Hp);
}

double grad_rho_l2(const Trajectory& traj) {
    return space_time_grad_l2(traj, [](double s) { return s; });
}

std::vector<std::pair<double, double>> translate_scan(const Trajectory& traj,
                                                      const ModelSpec& model, TranslateAxis axis,
                                                      const std::vector<double>& shifts) {
    require_dense(traj, "translate_scan");
    const Mesh& mesh = traj.at(0).mesh;
    const double dx = mesh.dx, dt = traj.time.dt, T = traj.time.horizon;
    const int cells = mesh.cell_count();
    // The interpolation uses rho^0 .. rho^N on the N+1 time intervals; the
    // final state rho^{N+1} lies outside [0, T) and does not enter.
    const int levels = traj.time.intervals;
    if (traj.count() < levels)
        throw std::invalid_argument("translate_scan: trajectory shorter than its time grid");

    std::vector<std::vector<double>> g(static_cast<std::size_t>(levels));
    for (int n = 0; n < levels; ++n) {
        const CellField& rho = traj.at(n);
        auto& gn = g[static_cast<std::size_t>(n)];
        gn.resize(static_cast<std::size_t>(cells));
        for (int i = 0; i < cells; ++i) gn[static_cast<std::size_t>(i)] = model.energy.Hp(rho[i]);
    }

    auto space_diff2 = [&](const std::vector<double>& gn, int offset) {
        double s = 0.0;
        for (int i = 0; i + offset < cells; ++i)
            s += (gn[static_cast<std::size_t>(i + offset)] - gn[static_cast<std::size_t>(i)]) *
                 (gn[static_cast<std::size_t>(i + offset)] - gn[static_cast<std::size_t>(i)]);
        return s;
    };
    auto time_diff2 = [&](int n, int offset) {
        const auto& a = g[static_cast<std::size_t>(n)];
        const auto& b = g[static_cast<std::size_t>(n + offset)];
        double s = 0.0;
        for (int i = 0; i < cells; ++i)
            s += (b[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)]) *
                 (b[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)]);
        return s * dx;
    };

    std::vector<std::pair<double, double>> out;
    out.reserve(shifts.size());
    for (double shift : shifts) {
        if (axis == TranslateAxis::Time) {
            if (!(shift > 0.0 && shift < T))
                throw std::invalid_argument("translate_scan: time shift outside (0, T)");
            const int K = static_cast<int>(std::floor(shift / dt));
            const double dl = shift - K * dt, dh = (K + 1) * dt - shift;
            // For t in interval n, t + shift lies in interval n+K for a
            // sub-interval of length dh and in n+K+1 for the remaining dl.
            double integral = 0.0;
            for (int n = 0; n + K < levels; ++n) integral += dh * time_diff2(n, K);
            for (int n = 0; n + K + 1 < levels; ++n) integral += dl * time_diff2(n, K + 1);
            out.emplace_back(shift, integral);
        } else {
            if (!(shift > 0.0 && shift < 2.0 * mesh.half_length))
                throw std::invalid_argument("translate_scan: space shift outside (0, 2L)");
            const int K = static_cast<int>(std::floor(shift / dx));
            const double dl = shift - K * dx, dh = (K + 1) * dx - shift;
            double integral = 0.0;
            for (int n = 0; n < levels; ++n) {
                const auto& gn = g[static_cast<std::size_t>(n)];
                double inner = dh * space_diff2(gn, K);
                if (K + 1 < cells) inner += dl * space_diff2(gn, K + 1);
                integral += inner * dt;
            }
            out.emplace_back(shift, integral);
        }
    }
    return out;
}

TestFunction cosine_test_function(int k, double T, double L) {
    const double freq = k * std::acos(-1.0) / (2.0 * L);
    TestFunction phi;
    phi.descr = "(1 - t/T) * cos(" + std::to_string(k) + "*pi*(x+L)/(2L))";
    phi.phi = [=](double t, double x) { return (1.0 - t / T) * std::cos(freq * (x + L)); };
    phi.dt_phi = [=](double, double x) { return -std::cos(freq * (x + L)) / T; };
    phi.dx_phi = [=](double t, double x) {
        return -(1.0 - t / T) * freq * std::sin(freq * (x + L));
    };
    return phi;
}

double weak_residual(const Trajectory& traj, const ModelSpec& model, const Discretization& disc,
                     const TestFunction& phi) {
    require_dense(traj, "weak_residual");
    const Mesh& mesh = traj.at(0).mesh;
    const double dx = mesh.dx, dt = traj.time.dt, T = traj.time.horizon;
    const double L = mesh.half_length;
    const int cells = mesh.cell_count();
    const int levels = traj.time.intervals;
    if (traj.count() < levels)
        throw std::invalid_argument("weak_residual: trajectory shorter than its time grid");

    for (int q = 0; q <= 64; ++q) {
        const double x = -L + 2.0 * L * q / 64.0;
        if (std::abs(phi.phi(T, x)) > 1e-12)
            throw std::invalid_argument("weak_residual: test function must vanish at t = T");
    }

    double time_term = 0.0, flux_term = 0.0;
    for (int n = 0; n < levels; ++n) {
        const CellField& rho = traj.at(n);
        const double t0 = n * dt, t1 = (n + 1) * dt;

        for (int i = 0; i < cells; ++i)
            time_term +=
                rho[i] * gauss33(phi.dt_phi, t0, t1, mesh.cell_left(i), mesh.cell_right(i));

        const CellField xi = entropy_variables(rho, rho, model, disc);
        const FaceField u = face_gradient(xi);
        for (int f = 0; f < u.size(); ++f) {
            const double xf = mesh.face_position(f);
            const double left = rho[f] * gauss33(phi.dx_phi, t0, t1, xf - 0.5 * dx, xf);
            const double right = rho[f + 1] * gauss33(phi.dx_phi, t0, t1, xf, xf + 0.5 * dx);
            flux_term += u[f] * (left + right);
        }
    }

    double init_term = 0.0;
    const CellField& rho0 = traj.at(0);
    for (int i = 0; i < cells; ++i)
        init_term += rho0[i] * gauss3([&](double x) { return phi.phi(0.0, x); }, mesh.cell_left(i),
                                      mesh.cell_right(i));

    return -time_term + flux_term - init_term;
}

}  // namespace adfv
