#include "adfv/solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "adfv/diagnostics.hpp"

namespace adfv {

namespace {

CellField rho_star_star(const CellField& rho_n, const CellField& theta, RhoStarStarPolicy policy) {
    switch (policy) {
        case RhoStarStarPolicy::Explicit:
            return rho_n;
        case RhoStarStarPolicy::Implicit:
            return theta;
        case RhoStarStarPolicy::Midpoint: {
            CellField mid(rho_n.mesh);
            for (int i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (rho_n[i] + theta[i]);
            return mid;
        }
    }
    return rho_n;
}

double policy_weight(RhoStarStarPolicy policy) {
    switch (policy) {
        case RhoStarStarPolicy::Explicit: return 0.0;
        case RhoStarStarPolicy::Implicit: return 1.0;
        case RhoStarStarPolicy::Midpoint: return 0.5;
    }
    return 0.0;
}

// Residual of the coupled scheme at theta: theta - rho_n + lambda*(F_r - F_l).
Eigen::VectorXd coupled_residual(const CellField& rho_n, const CellField& theta,
                                 const ModelSpec& model, const Discretization& disc,
                                 double lambda, RhoStarStarPolicy policy) {
    const int n = theta.size();
    const CellField xi = entropy_variables(theta, rho_star_star(rho_n, theta, policy), model, disc);
    const FaceField flux = upwind_flux(theta, velocities(xi));
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i)
        r[i] = theta[i] - rho_n[i] + lambda * (flux.right_of(i) - flux.left_of(i));
    return r;
}

// Damped line-search Newton on the coupled scheme, used when the Picard
// sweep stalls (its linearization is expansive once dt >> dx^2 / H'').
// The upwind switch is handled semismoothly: the active branch at the
// current iterate is differentiated.
bool newton_fallback(const CellField& rho_n, const ModelSpec& model, const Discretization& disc,
                     const SolverConfig& config, CellField& theta, int budget, int& iters_used,
                     std::vector<double>& history) {
    const Mesh& mesh = rho_n.mesh;
    const int n = rho_n.size();
    const double dx = mesh.dx;
    const double lambda = config.dt / dx;
    const double cpol = policy_weight(config.rho_policy);
    const bool inter = disc.interaction;

    double floor_value = 0.0;
    if (model.positivity_required) {
        double lo = rho_n[0];
        for (int i = 1; i < n; ++i) lo = std::min(lo, rho_n[i]);
        floor_value = 1e-12 * lo;
    }
    for (int i = 0; i < n; ++i) theta[i] = std::max(theta[i], floor_value);

    for (int k = 0; k < budget; ++k) {
        const Eigen::VectorXd r = coupled_residual(rho_n, theta, model, disc, lambda,
                                                   config.rho_policy);
        const CellField xi =
            entropy_variables(theta, rho_star_star(rho_n, theta, config.rho_policy), model, disc);
        const FaceField u = velocities(xi);

        // dxi(i,j) = H''(theta_i) delta_ij + cpol * W_{i-j} * dx
        Eigen::MatrixXd dxi = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            double hpp = model.energy.Hpp(theta[i]);
            if (!std::isfinite(hpp)) hpp = 1e150;
            dxi(i, i) = hpp;
        }
        if (inter)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) dxi(i, j) += cpol * disc.kernel.at(i - j) * dx;

        Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(n, n);
        for (int f = 0; f + 1 < n; ++f) {  // interior face between cells f, f+1
            const double uf = u[f];
            const double up = std::max(uf, 0.0), un = std::min(uf, 0.0);
            const double donor =
                uf > 0.0 ? theta[f] : (uf < 0.0 ? theta[f + 1] : 0.5 * (theta[f] + theta[f + 1]));
            for (int j = 0; j < n; ++j) {
                const double du = -(dxi(f + 1, j) - dxi(f, j)) / dx;
                const double df = (j == f ? up : 0.0) + (j == f + 1 ? un : 0.0) + donor * du;
                jac(f, j) += lambda * df;
                jac(f + 1, j) -= lambda * df;
            }
        }

        const Eigen::VectorXd step = jac.partialPivLu().solve(-r);
        const double phi0 = r.squaredNorm();
        double norm0 = 0.0, step_norm = 0.0;
        for (int i = 0; i < n; ++i) {
            norm0 = std::max(norm0, std::abs(theta[i]));
            step_norm = std::max(step_norm, std::abs(step[i]));
        }
        // at the solution the residual sits at rounding level and no line
        // search can improve it; the step size is the honest signal
        if (std::isfinite(step_norm) && step_norm <= config.tol * (1.0 + norm0)) {
            for (int i = 0; i < n; ++i) theta[i] = std::max(theta[i] + step[i], floor_value);
            history.push_back(step_norm);
            ++iters_used;
            return true;
        }
        CellField trial(mesh);
        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls) {
            for (int i = 0; i < n; ++i)
                trial[i] = std::max(theta[i] + t * step[i], floor_value);
            const double phi =
                coupled_residual(rho_n, trial, model, disc, lambda, config.rho_policy)
                    .squaredNorm();
            if (std::isfinite(phi) && (phi <= (1.0 - 1e-4 * t) * phi0 || phi < 1e-30)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        double diff = 0.0, norm = 0.0;
        for (int i = 0; i < n; ++i) {
            diff = std::max(diff, std::abs(trial[i] - theta[i]));
            norm = std::max(norm, std::abs(theta[i]));
        }
        history.push_back(diff);
        ++iters_used;
        if (!accepted) return false;
        theta = trial;
        if (diff <= config.tol * (1.0 + norm)) return true;
    }
    return false;
}

}  // namespace

Discretization discretize_model(const ModelSpec& model, const Mesh& mesh) {
    model.validate_initial_datum(mesh.half_length);
    Discretization disc;
    disc.mesh = mesh;
    disc.initial = discretize_initial(model.initial_datum, mesh);
    disc.potential = discretize_potential(model.potentials.V, mesh);
    disc.kernel = build_kernel(model.potentials.W, mesh);
    disc.interaction = !disc.kernel.is_zero();
    return disc;
}

CellField entropy_variables(const CellField& rho, const CellField& rho_ss, const ModelSpec& model,
                            const Discretization& disc) {
    CellField xi(rho.mesh);
    if (!model.energy.hp_finite_at_zero) {
        for (int i = 0; i < rho.size(); ++i)
            if (!(rho[i] > 0.0))
                throw std::domain_error(
                    "entropy_variables: H'(0) is not finite for this energy; density must stay "
                    "strictly positive (cell " + std::to_string(i + 1) + ")");
    }
    if (disc.interaction) {
        const CellField w_conv = convolve(disc.kernel, rho_ss);
        for (int i = 0; i < rho.size(); ++i)
            xi[i] = model.energy.Hp(rho[i]) + disc.potential[i] + w_conv[i];
    } else {
        for (int i = 0; i < rho.size(); ++i)
            xi[i] = model.energy.Hp(rho[i]) + disc.potential[i];
    }
    return xi;
}

FaceField velocities(const CellField& xi) {
    FaceField u = face_gradient(xi);
    for (int f = 0; f < u.size(); ++f) u[f] = -u[f];
    return u;
}

FaceField upwind_flux(const CellField& rho, const FaceField& u) {
    FaceField flux(rho.mesh);
    for (int f = 0; f < flux.size(); ++f) {
        const double up = std::max(u[f], 0.0);
        const double un = std::min(u[f], 0.0);
        flux[f] = rho[f] * up + rho[f + 1] * un;
    }
    return flux;
}

CellField transport_solve(const CellField& rho_n, const FaceField& u, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("transport_solve: dt must be positive");
    const int n = rho_n.size();
    const double lambda = dt / rho_n.mesh.dx;

    // Row i: theta_i*(1 + lambda*(u+_{i+1/2} - u-_{i-1/2}))
    //        + lambda*u-_{i+1/2}*theta_{i+1} - lambda*u+_{i-1/2}*theta_{i-1} = rho_i.
    std::vector<double> diag(static_cast<std::size_t>(n));
    std::vector<double> upper(static_cast<std::size_t>(n), 0.0);  // coeff of theta_{i+1}
    std::vector<double> lower(static_cast<std::size_t>(n), 0.0);  // coeff of theta_{i-1}
    for (int i = 0; i < n; ++i) {
        const double u_r = u.right_of(i), u_l = u.left_of(i);
        diag[static_cast<std::size_t>(i)] =
            1.0 + lambda * (std::max(u_r, 0.0) - std::min(u_l, 0.0));
        if (i + 1 < n) upper[static_cast<std::size_t>(i)] = lambda * std::min(u_r, 0.0);
        if (i > 0) lower[static_cast<std::size_t>(i)] = -lambda * std::max(u_l, 0.0);
    }

    // Thomas elimination. The matrix is an M-matrix with unit column sums;
    // pivots cannot drop below 1 in exact arithmetic.
    std::vector<double> c(static_cast<std::size_t>(n), 0.0);
    CellField theta(rho_n.mesh);
    double pivot = diag[0];
    if (!(pivot >= 1.0 - 1e-12)) throw std::runtime_error("transport_solve: pivot breakdown");
    c[0] = upper[0] / pivot;
    theta[0] = rho_n[0] / pivot;
    for (int i = 1; i < n; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        pivot = diag[k] - lower[k] * c[k - 1];
        if (!(pivot >= 1.0 - 1e-12)) throw std::runtime_error("transport_solve: pivot breakdown");
        c[k] = upper[k] / pivot;
        theta[i] = (rho_n[i] - lower[k] * theta[i - 1]) / pivot;
    }
    for (int i = n - 2; i >= 0; --i)
        theta[i] -= c[static_cast<std::size_t>(i)] * theta[i + 1];
    return theta;
}

std::pair<CellField, StepReport> implicit_step(const CellField& rho_n, const ModelSpec& model,
                                               const Discretization& disc,
                                               const SolverConfig& config) {
    const double dt = config.dt;
    if (!(dt > 0.0)) throw std::invalid_argument("implicit_step: dt must be positive");

    StepReport report;
    report.mass_before = mass(rho_n);
    report.energy_before = discrete_energy(rho_n, disc.potential, disc.kernel, model);

    CellField theta = rho_n;  // warm start, O(dt) from the fixed point
    CellField transported = rho_n;
    double omega = config.damping;
    int stagnation = 0;
    double best_residual = std::numeric_limits<double>::infinity();
    CellField best_theta = rho_n;
    std::vector<double> history;
    bool converged = false;
    int iters = 0;

    // Phase 1: damped Picard on the velocities, each iterate an exact
    // tridiagonal transport solve. Contractive only for modest dt/dx^2.
    const int picard_budget = std::min(config.max_outer_iters, 24);
    for (int k = 0; k < picard_budget; ++k) {
        const CellField rho_ss = rho_star_star(rho_n, theta, config.rho_policy);
        const CellField xi = entropy_variables(theta, rho_ss, model, disc);
        const FaceField u = velocities(xi);
        transported = transport_solve(rho_n, u, dt);

        CellField theta_next(theta.mesh);
        for (int i = 0; i < theta.size(); ++i)
            theta_next[i] = (1.0 - omega) * theta[i] + omega * transported[i];

        const double residual = sup_diff(theta_next, theta);
        history.push_back(residual);
        iters = k + 1;
        report.final_residual = residual;

        const bool improved = residual < best_residual;
        if (improved) {
            best_residual = residual;
            best_theta = theta;
        }
        if (residual <= config.tol * (1.0 + lp_norm(theta, kInfNorm))) {
            converged = true;
            break;
        }
        // halve the damping once the best residual stops improving; a plain
        // decrease test never fires on period-2 oscillation
        if (!improved) {
            if (++stagnation >= 5) {
                omega = std::max(omega * 0.5, 1.0 / 16.0);
                stagnation = 0;
            }
        } else {
            stagnation = 0;
        }
        theta = theta_next;
    }

    // Phase 2: the Picard map is expansive for stiff steps; switch to a
    // line-search Newton solve of the coupled system, then realize the state
    // through one last transport solve so mass and nonnegativity stay exact.
    if (!converged && iters < config.max_outer_iters) {
        theta = best_theta;
        converged = newton_fallback(rho_n, model, disc, config, theta,
                                    config.max_outer_iters - iters, iters, history);
        if (converged) {
            const CellField rho_ss = rho_star_star(rho_n, theta, config.rho_policy);
            const FaceField u = velocities(entropy_variables(theta, rho_ss, model, disc));
            transported = transport_solve(rho_n, u, dt);
            report.final_residual = history.back();
        }
    }
    report.outer_iters = iters;

    if (!converged)
        throw SolverError("implicit_step: fixed-point iteration failed to converge in " +
                              std::to_string(iters) + " iterations (residual " +
                              std::to_string(history.back()) + ")",
                          history);

    // Mass conservation and nonnegativity hold exactly for the transport output.
    const CellField& next = transported;
    if (model.positivity_required)
        for (int i = 0; i < next.size(); ++i)
            if (!(next[i] > 0.0))
                throw SolverError("implicit_step: positivity loss in cell " + std::to_string(i + 1),
                                  history);

    report.mass_after = mass(next);
    report.energy_after = discrete_energy(next, disc.potential, disc.kernel, model);
    report.dissipation_slack = report.energy_before - report.energy_after;
    report.min_density = *std::min_element(next.values.begin(), next.values.end());
    report.max_density = *std::max_element(next.values.begin(), next.values.end());

    // Residual of the fully-coupled scheme at the accepted state, reported for
    // transparency; the stopping test above is on successive iterates.
    {
        const CellField rho_ss = rho_star_star(rho_n, next, config.rho_policy);
        const CellField xi = entropy_variables(next, rho_ss, model, disc);
        const FaceField flux = upwind_flux(next, velocities(xi));
        const CellField div = cell_divergence(flux);
        double r = 0.0;
        for (int i = 0; i < next.size(); ++i)
            r = std::max(r, std::abs((next[i] - rho_n[i]) / dt + div[i]));
        report.scheme_residual = r;
    }
    return {next, report};
}

RunResult run(const ModelSpec& model, const Mesh& mesh, const TimeGrid& time, SolverConfig config,
              int snapshot_cadence) {
    return run(model, discretize_model(model, mesh), time, config, snapshot_cadence);
}

RunResult run(const ModelSpec& model, const Discretization& disc, const TimeGrid& time,
              SolverConfig config, int snapshot_cadence) {
    if (snapshot_cadence < 1) snapshot_cadence = 1;
    if (config.dt <= 0.0) config.dt = time.dt;
    config.rho_policy = model.policy;

    RunResult result;
    result.trajectory.time = time;
    result.trajectory.snapshot_cadence = snapshot_cadence;
    result.trajectory.snapshot_steps.push_back(0);
    result.trajectory.snapshots.push_back(disc.initial);

    CellField rho = disc.initial;
    for (int n = 0; n < time.intervals; ++n) {
        try {
            auto [next, report] = implicit_step(rho, model, disc, config);
            report.step = n;
            result.reports.push_back(report);
            rho = std::move(next);
        } catch (const SolverError& e) {
            throw SolverError("step " + std::to_string(n) + ": " + e.what(),
                              e.residual_history());
        }
        if ((n + 1) % snapshot_cadence == 0 || n + 1 == time.intervals) {
            result.trajectory.snapshot_steps.push_back(n + 1);
            result.trajectory.snapshots.push_back(rho);
        }
    }
    return result;
}

}  // namespace adfv
