#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "adfv/diagnostics.hpp"
#include "adfv/solver.hpp"

using namespace adfv;

namespace {

ModelSpec smooth_model(EnergyFamily energy, Potential V, Potential W) {
    PotentialSpec p;
    p.V = std::move(V);
    p.W = std::move(W);
    return make_model(std::move(energy), std::move(p),
                      [](double x) { return 0.3 + std::exp(-3.0 * x * x); }, "offset bump",
                      RhoStarStarPolicy::Midpoint);
}

Trajectory constant_trajectory(const Mesh& m, double value, int steps) {
    Trajectory traj;
    traj.time = build_time_grid(1.0 * steps, steps);
    for (int n = 0; n <= steps; ++n) {
        traj.snapshot_steps.push_back(n);
        traj.snapshots.emplace_back(m, value);
    }
    return traj;
}

}  // namespace

TEST_CASE("discrete energy closed cases") {
    ModelSpec model = smooth_model(porous_medium_energy(2.0), zero_potential(), zero_potential());
    const Mesh m = build_mesh(1.0, 4);
    KernelTable zero_kernel;
    zero_kernel.mesh = m;
    zero_kernel.values.assign(static_cast<std::size_t>(2 * m.cell_count() - 1), 0.0);
    const CellField no_v(m, 0.0);

    CellField c(m, 0.7);
    CHECK(discrete_energy(c, no_v, zero_kernel, model) ==
          doctest::Approx(2.0 * model.energy.H(0.7)));
    CellField z(m, 0.0);
    CHECK(discrete_energy(z, no_v, zero_kernel, model) == doctest::Approx(0.0));

    // 2 cells, dx = 1, rho = (1,2), H = s^2, V = 0, W == 1:
    // (1 + 4) + 0.5 * (1+2)^2 = 9.5
    const Mesh two = build_mesh(1.0, 1);
    KernelTable ones;
    ones.mesh = two;
    ones.values.assign(3, 1.0);
    CellField rho(two);
    rho[0] = 1.0;
    rho[1] = 2.0;
    const CellField v2(two, 0.0);
    CHECK(discrete_energy(rho, v2, ones, model) == doctest::Approx(9.5));
}

TEST_CASE("bound constants") {
    const Mesh m = build_mesh(1.0, 8);
    ModelSpec quad = smooth_model(porous_medium_energy(2.0), quadratic_potential(1.0),
                                  zero_potential());
    const BoundConstants c = bound_constants(quad, m, 1.0);
    CHECK(c.c_v1 == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(c.c_v2 == doctest::Approx(1.0).epsilon(1e-3));

    ModelSpec free = smooth_model(porous_medium_energy(2.0), zero_potential(), zero_potential());
    const BoundConstants c0 = bound_constants(free, m, 1.0);
    CHECK(c0.c_v1 == 0.0);
    CHECK(c0.c_v2 == 0.0);

    // constant W contributes nothing through its derivatives
    ModelSpec constw = smooth_model(porous_medium_energy(2.0), quadratic_potential(1.0),
                                    expression_potential("1"));
    const BoundConstants cw = bound_constants(constw, m, 5.0);
    CHECK(cw.c_v1 == doctest::Approx(1.0).epsilon(1e-3));

    const TimeGrid time = build_time_grid(1.0, 10);
    const BoundConstants ce = bound_constants(quad, m, 1.0, time, 2.0);
    CHECK(ce.c_inf ==
          doctest::Approx(std::pow(1.0 - 0.1 * ce.c_v2, -10) * 2.0).epsilon(1e-6));
}

TEST_CASE("dissipation check on real and doctored runs") {
    const Mesh m = build_mesh(1.0, 16);
    ModelSpec model = smooth_model(porous_medium_energy(2.0), quadratic_potential(1.0),
                                   gaussian_potential(0.5, 0.4));
    const RunResult result = run(model, m, build_time_grid(0.5, 10), SolverConfig{}, 1);
    const InequalityReport ok = dissipation_check(result.reports);
    CHECK(ok.holds);

    std::vector<StepReport> doctored = result.reports;
    doctored[3].energy_after = doctored[3].energy_before + 1.0;
    const InequalityReport bad = dissipation_check(doctored);
    CHECK_FALSE(bad.holds);
    CHECK(bad.worst_step == doctored[3].step);
}

TEST_CASE("Linf envelope check") {
    const Mesh m = build_mesh(1.0, 16);

    // no potentials: envelope is flat, any real run satisfies it
    ModelSpec model = smooth_model(porous_medium_energy(2.0), zero_potential(), zero_potential());
    const RunResult result = run(model, m, build_time_grid(0.5, 10), SolverConfig{}, 1);
    BoundConstants c = bound_constants(model, m, mass(result.trajectory.snapshots.front()));
    const InequalityReport flat = linf_envelope_check(result.trajectory, c, 0.05);
    CHECK(flat.holds);
    CHECK_FALSE(flat.skipped);

    // constant-in-time trajectory holds trivially
    const Trajectory steady = constant_trajectory(m, 0.4, 5);
    BoundConstants c1;
    c1.c_v2 = 0.5;
    CHECK(linf_envelope_check(steady, c1, 0.1).holds);

    // hypothesis violated -> skipped with a note
    BoundConstants big;
    big.c_v2 = 20.0;
    const InequalityReport skipped = linf_envelope_check(steady, big, 0.1);
    CHECK(skipped.skipped);
    CHECK_FALSE(skipped.note.empty());
}

TEST_CASE("velocity bound check") {
    const Mesh m = build_mesh(1.0, 32);
    ModelSpec model = smooth_model(porous_medium_energy(2.0), quadratic_potential(1.0),
                                   gaussian_potential(0.5, 0.4));
    const Discretization disc = discretize_model(model, m);
    const BoundConstants c = bound_constants(model, m, mass(disc.initial));
    const InequalityReport r = velocity_bound_check(disc, disc.initial, c);
    CHECK(r.holds);
}

TEST_CASE("flow interchange on porous-medium runs") {
    const Mesh m = build_mesh(1.0, 24);
    for (double mm : {3.0, 4.0}) {
        ModelSpec model = smooth_model(porous_medium_energy(mm), quadratic_potential(1.0),
                                       gaussian_potential(0.4, 0.4));
        const RunResult result = run(model, m, build_time_grid(0.4, 16), SolverConfig{}, 1);
        const BoundConstants c =
            bound_constants(model, m, mass(result.trajectory.snapshots.front()));
        const AuxiliaryFunctional aux = build_auxiliary(model.energy, 0.0);
        const InequalityReport r =
            flow_interchange_check(result.trajectory, model, aux, c, 0.5);
        CHECK(r.holds);
        CHECK(r.name == "flow_interchange");
    }

    // steady constant state with no potentials: both sides vanish
    ModelSpec free = smooth_model(porous_medium_energy(3.0), zero_potential(), zero_potential());
    free.initial_datum = [](double) { return 0.8; };
    const RunResult steady = run(free, m, build_time_grid(0.4, 4), SolverConfig{}, 1);
    const BoundConstants c0 = bound_constants(free, m, mass(steady.trajectory.snapshots.front()));
    const AuxiliaryFunctional aux3 = build_auxiliary(free.energy, 0.0);
    const InequalityReport r0 = flow_interchange_check(steady.trajectory, free, aux3, c0, 0.5);
    CHECK(r0.holds);
    CHECK(std::abs(r0.slack) <= 2.0 * r0.tolerance);
}

TEST_CASE("flow interchange quadratic variant for the Boltzmann family") {
    const Mesh m = build_mesh(1.0, 24);
    ModelSpec model = smooth_model(boltzmann_energy(), quadratic_potential(1.0), zero_potential());
    const RunResult result = run(model, m, build_time_grid(0.4, 16), SolverConfig{}, 1);
    const BoundConstants c = bound_constants(model, m, mass(result.trajectory.snapshots.front()));
    AuxiliaryFunctional unused;
    const InequalityReport r = flow_interchange_check(result.trajectory, model, unused, c, 0.5);
    CHECK(r.holds);
    CHECK(r.name == "flow_interchange_quadratic");
}

TEST_CASE("space-time gradient norms") {
    const Mesh m = build_mesh(1.0, 8);
    ModelSpec model = smooth_model(porous_medium_energy(2.0), zero_potential(), zero_potential());
    const Trajectory steady = constant_trajectory(m, 0.4, 3);
    CHECK(grad_H_l2(steady, model) == doctest::Approx(0.0));
    CHECK(grad_rho_l2(steady) == doctest::Approx(0.0));

    // single step, 2 cells, dx = dt = 1, H'(rho^1) = (1, 3): integral 2^2 * 1 * 1
    const Mesh two = build_mesh(1.0, 1);
    Trajectory traj;
    traj.time = build_time_grid(1.0, 1);
    traj.snapshot_steps = {0, 1};
    traj.snapshots.emplace_back(two, 0.0);
    CellField after(two);
    after[0] = 0.5;  // H' = 2s for m = 2
    after[1] = 1.5;
    traj.snapshots.push_back(after);
    CHECK(grad_H_l2(traj, model) == doctest::Approx(2.0));
}

TEST_CASE("translate scans") {
    const Mesh m = build_mesh(1.0, 8);
    ModelSpec model = smooth_model(porous_medium_energy(3.0), zero_potential(), zero_potential());

    const Trajectory steady = constant_trajectory(m, 0.6, 8);
    for (auto [shift, integral] :
         translate_scan(steady, model, TranslateAxis::Time, {0.3, 1.7, 4.2}))
        CHECK(integral == doctest::Approx(0.0));
    for (auto [shift, integral] :
         translate_scan(steady, model, TranslateAxis::Space, {0.1, 0.5, 1.3}))
        CHECK(integral == doctest::Approx(0.0));

    CHECK_THROWS(translate_scan(steady, model, TranslateAxis::Time, {9.0}));
    CHECK_THROWS(translate_scan(steady, model, TranslateAxis::Space, {2.5}));

    // hand-checked time scan: 2 cells, two intervals (dt = 1), states A, B
    // used on [0, 2); shift 0.5 overlaps (A,A) for 0.5 and (A,B) for 0.5
    Trajectory two_steps;
    two_steps.time = build_time_grid(2.0, 2);
    const Mesh two = build_mesh(1.0, 1);
    CellField a(two), b(two);
    a[0] = 1.0;
    a[1] = 1.0;
    b[0] = 2.0;
    b[1] = 1.0;
    two_steps.snapshot_steps = {0, 1, 2};
    two_steps.snapshots = {a, b, b};
    ModelSpec m3 = smooth_model(porous_medium_energy(3.0), zero_potential(), zero_potential());
    // H'(s) = 1.5 s^2: |H'(2) - H'(1)|^2 = 4.5^2 = 20.25 in the first cell only
    const auto scan = translate_scan(two_steps, m3, TranslateAxis::Time, {0.5});
    CHECK(scan[0].second == doctest::Approx(0.5 * 20.25 * two.dx));

    // smooth run: integrals grow roughly linearly in the shift
    ModelSpec drift = smooth_model(porous_medium_energy(3.0), quadratic_potential(1.0),
                                   zero_potential());
    const RunResult result = run(drift, m, build_time_grid(1.0, 64), SolverConfig{}, 1);
    std::vector<double> shifts;
    for (int k = 1; k <= 10; ++k) shifts.push_back(0.05 * k);
    const auto scans = translate_scan(result.trajectory, drift, TranslateAxis::Time, shifts);
    for (std::size_t k = 0; k + 1 < scans.size(); ++k)
        CHECK(scans[k].second <= scans[k + 1].second + 1e-12);
}

TEST_CASE("weak residual") {
    const Mesh m = build_mesh(1.0, 8);
    ModelSpec model = smooth_model(porous_medium_energy(2.0), zero_potential(), zero_potential());
    const Discretization disc = discretize_model(model, m);

    // constant trajectory with no potentials: time term cancels the initial term
    Trajectory steady = constant_trajectory(m, 0.5, 4);
    const TestFunction phi1 = cosine_test_function(0, steady.time.horizon, 1.0);
    CHECK(std::abs(weak_residual(steady, model, disc, phi1)) < 1e-12);

    TestFunction zero;
    zero.phi = [](double, double) { return 0.0; };
    zero.dt_phi = [](double, double) { return 0.0; };
    zero.dx_phi = [](double, double) { return 0.0; };
    CHECK(weak_residual(steady, model, disc, zero) == doctest::Approx(0.0));

    // phi(T) != 0 rejected
    TestFunction bad;
    bad.phi = [](double, double) { return 1.0; };
    bad.dt_phi = [](double, double) { return 0.0; };
    bad.dx_phi = [](double, double) { return 0.0; };
    CHECK_THROWS(weak_residual(steady, model, disc, bad));

    // k = 0 mode: residual vanishes by exact mass conservation for any run
    ModelSpec drift = smooth_model(porous_medium_energy(2.0), quadratic_potential(1.0),
                                   zero_potential());
    const Discretization ddisc = discretize_model(drift, m);
    const TimeGrid time = build_time_grid(0.5, 8);
    const RunResult result = run(drift, ddisc, time, SolverConfig{}, 1);
    const TestFunction phi0 = cosine_test_function(0, time.horizon, 1.0);
    CHECK(std::abs(weak_residual(result.trajectory, drift, ddisc, phi0)) < 1e-10);
}
