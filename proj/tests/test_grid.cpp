#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "adfv/grid.hpp"

using namespace adfv;

TEST_CASE("mesh geometry") {
    const Mesh m = build_mesh(1.0, 2);
    CHECK(m.dx == doctest::Approx(0.5));
    CHECK(m.cell_count() == 4);
    CHECK(m.cell_center(0) == doctest::Approx(-0.75));
    CHECK(m.cell_center(1) == doctest::Approx(-0.25));
    CHECK(m.cell_center(2) == doctest::Approx(0.25));
    CHECK(m.cell_center(3) == doctest::Approx(0.75));
    CHECK(m.face_position(0) == doctest::Approx(-0.5));

    const Mesh tiny = build_mesh(1.0, 1);
    CHECK(tiny.dx == doctest::Approx(1.0));
    CHECK(tiny.cell_center(0) == doctest::Approx(-0.5));
    CHECK(tiny.cell_center(1) == doctest::Approx(0.5));

    const Mesh wide = build_mesh(2.5, 5);
    CHECK(wide.dx == doctest::Approx(0.5));
    CHECK(wide.cell_center(0) == doctest::Approx(-2.25));
    CHECK(wide.cell_center(9) == doctest::Approx(2.25));

    CHECK_THROWS(build_mesh(-1.0, 2));
    CHECK_THROWS(build_mesh(1.0, 0));
}

TEST_CASE("time grid") {
    const TimeGrid t = build_time_grid(1.0, 4);
    CHECK(t.dt == doctest::Approx(0.25));
    CHECK(t.intervals == 4);
    CHECK_THROWS(build_time_grid(0.0, 4));
    CHECK_THROWS(build_time_grid(1.0, 0));
}

TEST_CASE("face gradient") {
    const Mesh m = build_mesh(1.0, 2);
    CellField constant(m, 3.0);
    const FaceField g0 = face_gradient(constant);
    for (int f = 0; f < g0.size(); ++f) CHECK(g0[f] == 0.0);

    CellField linear(m);
    for (int i = 0; i < linear.size(); ++i) linear[i] = m.cell_center(i);
    const FaceField g1 = face_gradient(linear);
    for (int f = 0; f < g1.size(); ++f) CHECK(g1[f] == doctest::Approx(1.0));

    Mesh two = build_mesh(0.5, 1);  // dx = 0.5
    CellField pair(two);
    pair[0] = 1.0;
    pair[1] = 3.0;
    CHECK(face_gradient(pair)[0] == doctest::Approx(4.0));
}

TEST_CASE("cell divergence and no-flux telescoping") {
    Mesh two = build_mesh(1.0, 1);  // dx = 1, 2 cells
    FaceField g(two);
    g[0] = 2.0;
    const CellField d = cell_divergence(g);
    CHECK(d[0] == doctest::Approx(2.0));
    CHECK(d[1] == doctest::Approx(-2.0));

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    const Mesh m = build_mesh(1.0, 16);
    FaceField r(m);
    for (int f = 0; f < r.size(); ++f) r[f] = u(rng);
    double total = 0.0;
    const CellField div = cell_divergence(r);
    for (int i = 0; i < div.size(); ++i) total += div[i] * m.dx;
    CHECK(std::abs(total) < 1e-12);
}

TEST_CASE("summation by parts on random sequences") {
    // sum_{i=m}^{n} a_i (b_{i+1} - b_i) + sum_{i=m}^{n-1} (a_{i+1} - a_i) b_{i+1}
    //   = a_n b_{n+1} - a_m b_m
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 20);
        std::vector<double> a(static_cast<std::size_t>(n + 2)), b(a.size());
        for (auto& v : a) v = u(rng);
        for (auto& v : b) v = u(rng);
        const int m = static_cast<int>(rng() % static_cast<unsigned>(n - 1));
        double lhs = 0.0;
        for (int i = m; i <= n; ++i) lhs += a[static_cast<std::size_t>(i)] *
                                            (b[static_cast<std::size_t>(i + 1)] -
                                             b[static_cast<std::size_t>(i)]);
        for (int i = m; i <= n - 1; ++i)
            lhs += (a[static_cast<std::size_t>(i + 1)] - a[static_cast<std::size_t>(i)]) *
                   b[static_cast<std::size_t>(i + 1)];
        const double rhs = a[static_cast<std::size_t>(n)] * b[static_cast<std::size_t>(n + 1)] -
                           a[static_cast<std::size_t>(m)] * b[static_cast<std::size_t>(m)];
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("lp norms") {
    const Mesh m = build_mesh(1.0, 4);
    CellField c(m, 2.5);
    CHECK(lp_norm(c, 1.0) == doctest::Approx(2.0 * 2.5));  // 2L * |c|

    Mesh two = build_mesh(1.0, 1);
    CellField f(two);
    f[0] = 3.0;
    f[1] = -4.0;
    CHECK(lp_norm(f, kInfNorm) == doctest::Approx(4.0));

    Mesh half = build_mesh(0.5, 1);  // dx = 0.5
    CellField g(half);
    g[0] = 3.0;
    g[1] = 4.0;
    CHECK(lp_norm(g, 2.0) == doctest::Approx(std::sqrt(0.5 * 25.0)));

    CHECK_THROWS(lp_norm(g, 0.5));

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Mesh big = build_mesh(1.0, 8);
    for (double p : {1.0, 2.0, 3.5, kInfNorm}) {
        CellField a(big), b(big), sum(big), scaled(big);
        for (int i = 0; i < a.size(); ++i) {
            a[i] = u(rng);
            b[i] = u(rng);
            sum[i] = a[i] + b[i];
            scaled[i] = -2.5 * a[i];
        }
        CHECK(lp_norm(sum, p) <= lp_norm(a, p) + lp_norm(b, p) + 1e-12);
        CHECK(lp_norm(scaled, p) == doctest::Approx(2.5 * lp_norm(a, p)));
    }
}

TEST_CASE("compensated sum beats naive accumulation") {
    std::vector<double> terms;
    for (int i = 0; i < 100000; ++i) terms.push_back(1e-10);
    terms.push_back(1e10);
    const double s = compensated_sum(terms);
    CHECK(s == doctest::Approx(1e10 + 1e-5).epsilon(1e-15));
}
