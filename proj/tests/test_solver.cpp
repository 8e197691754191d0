#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "adfv/diagnostics.hpp"
#include "adfv/solver.hpp"

using namespace adfv;

namespace {

ModelSpec basic_model(EnergyFamily energy, Potential V, Potential W,
                      RhoStarStarPolicy policy = RhoStarStarPolicy::Midpoint) {
    PotentialSpec p;
    p.V = std::move(V);
    p.W = std::move(W);
    return make_model(std::move(energy), std::move(p),
                      [](double x) { return 0.2 + std::exp(-4.0 * x * x); }, "offset bump",
                      policy);
}

}  // namespace

TEST_CASE("entropy variables and velocities") {
    const Mesh m = build_mesh(1.0, 2);
    ModelSpec model = basic_model(porous_medium_energy(2.0), zero_potential(), zero_potential());
    const Discretization disc = discretize_model(model, m);

    CellField rho(m, 1.0);
    const CellField xi = entropy_variables(rho, rho, model, disc);
    for (int i = 0; i < xi.size(); ++i) CHECK(xi[i] == doctest::Approx(2.0));  // H'(1) = 2

    const FaceField u = velocities(xi);
    for (int f = 0; f < u.size(); ++f) CHECK(u[f] == doctest::Approx(0.0));

    // decreasing xi gives positive velocities
    CellField down(m);
    for (int i = 0; i < down.size(); ++i) down[i] = -static_cast<double>(i);
    const FaceField up = velocities(down);
    for (int f = 0; f < up.size(); ++f) CHECK(up[f] > 0.0);

    // Boltzmann rejects zero densities
    ModelSpec boltz = basic_model(boltzmann_energy(), zero_potential(), zero_potential());
    const Discretization bdisc = discretize_model(boltz, m);
    CellField zero(m, 0.0);
    CHECK_THROWS(entropy_variables(zero, zero, boltz, bdisc));
}

TEST_CASE("upwind flux takes the donor cell") {
    const Mesh m = build_mesh(1.0, 1);
    CellField rho(m);
    rho[0] = 2.0;
    rho[1] = 1.0;
    FaceField u(m);
    u[0] = 3.0;
    CHECK(upwind_flux(rho, u)[0] == doctest::Approx(6.0));
    u[0] = -3.0;
    CHECK(upwind_flux(rho, u)[0] == doctest::Approx(-3.0));
    u[0] = 0.0;
    CHECK(upwind_flux(rho, u)[0] == doctest::Approx(0.0));
}

TEST_CASE("transport solve hand-checked example") {
    // 2 cells, dx = 1, u = 1 at the single face, dt = 0.5:
    // 1.5*theta_0 = 1 and theta_1 - 0.5*theta_0 = 1 give (2/3, 4/3)
    const Mesh m = build_mesh(1.0, 1);
    CellField rho(m, 1.0);
    FaceField u(m);
    u[0] = 1.0;
    const CellField theta = transport_solve(rho, u, 0.5);
    CHECK(theta[0] == doctest::Approx(2.0 / 3.0));
    CHECK(theta[1] == doctest::Approx(4.0 / 3.0));

    // zero velocity is the identity
    FaceField still(m);
    const CellField same = transport_solve(rho, still, 0.5);
    CHECK(same[0] == doctest::Approx(1.0));
    CHECK(same[1] == doctest::Approx(1.0));
}

TEST_CASE("transport solve conserves mass and nonnegativity") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> ud(-4.0, 4.0);
    std::uniform_real_distribution<double> ur(0.0, 3.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const int M = 1 + static_cast<int>(rng() % 64);
        const Mesh m = build_mesh(1.0, M);
        CellField rho(m);
        for (int i = 0; i < rho.size(); ++i) rho[i] = ur(rng);
        FaceField u(m);
        for (int f = 0; f < u.size(); ++f) u[f] = ud(rng);
        const double dt = 1e-3 + 0.2 * ur(rng);
        const CellField theta = transport_solve(rho, u, dt);
        CHECK(mass(theta) == doctest::Approx(mass(rho)).epsilon(1e-12));
        for (int i = 0; i < theta.size(); ++i) CHECK(theta[i] >= 0.0);
    }
}

TEST_CASE("transport solve agrees with a dense solve") {
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> ud(-3.0, 3.0);
    std::uniform_real_distribution<double> ur(0.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int M = 1 + static_cast<int>(rng() % 3);
        const Mesh m = build_mesh(1.0, M);
        const int n = m.cell_count();
        CellField rho(m);
        for (int i = 0; i < n; ++i) rho[i] = ur(rng);
        FaceField u(m);
        for (int f = 0; f < u.size(); ++f) u[f] = ud(rng);
        const double dt = 0.05 + 0.1 * ur(rng);
        const double lambda = dt / m.dx;

        // dense Gaussian elimination with partial pivoting on the same system
        std::vector<std::vector<double>> A(static_cast<std::size_t>(n),
                                           std::vector<double>(static_cast<std::size_t>(n), 0.0));
        std::vector<double> rhs(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double ur_ = u.right_of(i), ul_ = u.left_of(i);
            A[i][i] = 1.0 + lambda * (std::max(ur_, 0.0) - std::min(ul_, 0.0));
            if (i + 1 < n) A[i][i + 1] = lambda * std::min(ur_, 0.0);
            if (i > 0) A[i][i - 1] = -lambda * std::max(ul_, 0.0);
            rhs[static_cast<std::size_t>(i)] = rho[i];
        }
        for (int col = 0; col < n; ++col) {
            int piv = col;
            for (int r = col + 1; r < n; ++r)
                if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
            std::swap(A[col], A[piv]);
            std::swap(rhs[static_cast<std::size_t>(col)], rhs[static_cast<std::size_t>(piv)]);
            for (int r = col + 1; r < n; ++r) {
                const double factor = A[r][col] / A[col][col];
                for (int c = col; c < n; ++c) A[r][c] -= factor * A[col][c];
                rhs[static_cast<std::size_t>(r)] -= factor * rhs[static_cast<std::size_t>(col)];
            }
        }
        std::vector<double> x(static_cast<std::size_t>(n));
        for (int r = n - 1; r >= 0; --r) {
            double s = rhs[static_cast<std::size_t>(r)];
            for (int c = r + 1; c < n; ++c) s -= A[r][c] * x[static_cast<std::size_t>(c)];
            x[static_cast<std::size_t>(r)] = s / A[r][r];
        }

        const CellField theta = transport_solve(rho, u, dt);
        for (int i = 0; i < n; ++i)
            CHECK(theta[i] == doctest::Approx(x[static_cast<std::size_t>(i)]).epsilon(1e-12));
    }
}

TEST_CASE("implicit step fixed points and consistency") {
    const Mesh m = build_mesh(1.0, 16);
    ModelSpec model = basic_model(porous_medium_energy(2.0), zero_potential(), zero_potential());
    model.initial_datum = [](double) { return 0.7; };
    const Discretization disc = discretize_model(model, m);
    SolverConfig cfg;
    cfg.dt = 0.1;

    // constant state with no potentials stays put in one iteration
    auto [next, report] = implicit_step(disc.initial, model, disc, cfg);
    CHECK(report.outer_iters == 1);
    for (int i = 0; i < next.size(); ++i) CHECK(next[i] == doctest::Approx(0.7));

    // generic step: mass conserved, scheme residual small, energy dissipated
    ModelSpec drift = basic_model(porous_medium_energy(3.0), quadratic_potential(1.0),
                                  gaussian_potential(0.5, 0.4));
    const Mesh m2 = build_mesh(1.0, 32);
    const Discretization disc2 = discretize_model(drift, m2);
    SolverConfig cfg2;
    cfg2.dt = 0.05;
    auto [rho1, rep1] = implicit_step(disc2.initial, drift, disc2, cfg2);
    CHECK(rep1.mass_after == doctest::Approx(rep1.mass_before).epsilon(1e-12));
    CHECK(rep1.min_density >= 0.0);
    CHECK(rep1.scheme_residual <= 10.0 * cfg2.tol / cfg2.dt);
    CHECK(rep1.energy_after <= rep1.energy_before + 1e-10 * (1.0 + std::abs(rep1.energy_before)));
}

TEST_CASE("discrete Gibbs state is a fixed point of the Boltzmann scheme") {
    for (int M : {16, 32, 64}) {
        const Mesh m = build_mesh(1.0, M);
        ModelSpec model = basic_model(boltzmann_energy(), quadratic_potential(1.0),
                                      zero_potential());
        Discretization disc = discretize_model(model, m);
        CellField gibbs(m);
        for (int i = 0; i < gibbs.size(); ++i) gibbs[i] = std::exp(-disc.potential[i]);
        SolverConfig cfg;
        cfg.dt = 0.1;
        auto [next, report] = implicit_step(gibbs, model, disc, cfg);
        for (int i = 0; i < next.size(); ++i)
            CHECK(next[i] == doctest::Approx(gibbs[i]).epsilon(1e-9));
    }
}

TEST_CASE("velocity splits into entropic and potential parts") {
    const Mesh m = build_mesh(1.0, 24);
    ModelSpec model = basic_model(porous_medium_energy(2.0), quadratic_potential(0.8),
                                  gaussian_potential(0.6, 0.5));
    const Discretization disc = discretize_model(model, m);
    const CellField rho = disc.initial;

    const FaceField whole = velocities(entropy_variables(rho, rho, model, disc));

    CellField entropic(m), potential_part(m);
    const CellField w_conv = convolve(disc.kernel, rho);
    for (int i = 0; i < rho.size(); ++i) {
        entropic[i] = model.energy.Hp(rho[i]);
        potential_part[i] = disc.potential[i] + w_conv[i];
    }
    const FaceField h = velocities(entropic);
    const FaceField v = velocities(potential_part);
    for (int f = 0; f < whole.size(); ++f)
        CHECK(whole[f] == doctest::Approx(h[f] + v[f]).epsilon(1e-12));
}

TEST_CASE("run conserves mass and snapshots at cadence") {
    const Mesh m = build_mesh(1.0, 16);
    ModelSpec model = basic_model(porous_medium_energy(2.0), quadratic_potential(1.0),
                                  zero_potential());
    const TimeGrid time = build_time_grid(0.5, 10);
    const RunResult result = run(model, m, time, SolverConfig{}, 3);

    CHECK(result.reports.size() == 10);
    CHECK(result.trajectory.snapshot_steps.front() == 0);
    CHECK(result.trajectory.snapshot_steps.back() == 10);
    const double m0 = mass(result.trajectory.snapshots.front());
    for (const CellField& snap : result.trajectory.snapshots)
        CHECK(mass(snap) == doctest::Approx(m0).epsilon(1e-10));

    // zero datum stays zero
    ModelSpec zero_model = basic_model(porous_medium_energy(2.0), quadratic_potential(1.0),
                                       zero_potential());
    zero_model.initial_datum = [](double) { return 0.0; };
    const RunResult zr = run(zero_model, m, time, SolverConfig{}, 1);
    for (const CellField& snap : zr.trajectory.snapshots)
        for (int i = 0; i < snap.size(); ++i) CHECK(snap[i] == 0.0);
}
