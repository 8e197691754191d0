#include "adfv/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace adfv {

Mesh::Mesh(double L, int M) : half_length(L), half_cells(M), dx(L / M) {
    if (!(L > 0.0)) throw std::invalid_argument("Mesh: half_length must be positive");
    if (M < 1) throw std::invalid_argument("Mesh: half_cells must be a positive integer");
}

TimeGrid::TimeGrid(double T, int n_intervals)
    : horizon(T), intervals(n_intervals), dt(T / n_intervals) {
    if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
    if (n_intervals < 1) throw std::invalid_argument("TimeGrid: interval count must be positive");
}

Mesh build_mesh(double L, int M) { return Mesh(L, M); }

TimeGrid build_time_grid(double T, int n_intervals) { return TimeGrid(T, n_intervals); }

FaceField face_gradient(const CellField& f) {
    if (f.size() < 2) throw std::invalid_argument("face_gradient: need at least 2 cells");
    FaceField g(f.mesh);
    const double inv_dx = 1.0 / f.mesh.dx;
    for (int i = 0; i < g.size(); ++i) g[i] = (f[i + 1] - f[i]) * inv_dx;
    return g;
}

CellField cell_divergence(const FaceField& g) {
    CellField d(g.mesh);
    const double inv_dx = 1.0 / g.mesh.dx;
    for (int i = 0; i < d.size(); ++i) d[i] = (g.right_of(i) - g.left_of(i)) * inv_dx;
    return d;
}

double compensated_sum(const std::vector<double>& terms) {
    double s = 0.0, c = 0.0;
    for (double t : terms) {
        double y = t - c;
        double u = s + y;
        c = (u - s) - y;
        s = u;
    }
    return s;
}

namespace {

double lp_of_values(const std::vector<double>& v, double dx, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    std::vector<double> terms(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) terms[i] = std::pow(std::abs(v[i]), p) * dx;
    return std::pow(compensated_sum(terms), 1.0 / p);
}

}  // namespace

double lp_norm(const CellField& f, double p) { return lp_of_values(f.values, f.mesh.dx, p); }

double lp_norm(const FaceField& f, double p) { return lp_of_values(f.values, f.mesh.dx, p); }

double lp_norm_space_time(const std::vector<CellField>& snaps, double dt, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& s : snaps) m = std::max(m, lp_norm(s, p));
        return m;
    }
    std::vector<double> terms;
    terms.reserve(snaps.size());
    for (const auto& s : snaps) terms.push_back(std::pow(lp_norm(s, p), p) * dt);
    return std::pow(compensated_sum(terms), 1.0 / p);
}

double mass(const CellField& f) {
    std::vector<double> terms(f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i) terms[i] = f.values[i] * f.mesh.dx;
    return compensated_sum(terms);
}

double sup_diff(const CellField& a, const CellField& b) {
    double m = 0.0;
    for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace adfv
