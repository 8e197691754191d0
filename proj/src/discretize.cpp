#include "adfv/discretize.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "adfv/quadrature.hpp"

namespace adfv {

std::string to_string(Definiteness d) {
    switch (d) {
        case Definiteness::PositiveSemidefinite: return "positive_semidefinite";
        case Definiteness::NegativeSemidefinite: return "negative_semidefinite";
        case Definiteness::Indefinite: return "indefinite";
    }
    return "indefinite";
}

double cell_average(const ScalarFn& f, int cell, const Mesh& mesh) {
    const double a = mesh.cell_left(cell), b = mesh.cell_right(cell);
    const double avg = gauss5(f, a, b) / mesh.dx;
    if (!std::isfinite(avg))
        throw std::runtime_error("cell_average: non-finite sample in cell " +
                                 std::to_string(cell + 1));
    return avg;
}

CellField discretize_initial(const ScalarFn& rho0, const Mesh& mesh) {
    CellField out(mesh);
    for (int i = 0; i < out.size(); ++i) {
        double v = cell_average(rho0, i, mesh);
        if (v < 0.0) {
            // A slightly negative quadrature of a nonnegative datum is rounding;
            // anything bigger means the datum itself dips negative.
            if (v < -1e-12)
                throw std::runtime_error("discretize_initial: negative cell average in cell " +
                                         std::to_string(i + 1));
            v = 0.0;
        }
        out[i] = v;
    }
    return out;
}

CellField discretize_potential(const Potential& V, const Mesh& mesh) {
    CellField out(mesh);
    for (int i = 0; i < out.size(); ++i) out[i] = cell_average(V.f, i, mesh);
    return out;
}

KernelTable build_kernel(const Potential& W, const Mesh& mesh) {
    KernelTable table;
    table.mesh = mesh;
    const int kmax = mesh.cell_count() - 1;
    table.values.assign(static_cast<std::size_t>(2 * kmax + 1), 0.0);
    const double dx = mesh.dx;
    // W_k = avg over s in C_j of W(x_i - s): the argument sweeps
    // [k*dx - dx/2, k*dx + dx/2] regardless of the particular (i, j) pair.
#pragma omp parallel for schedule(static)
    for (int k = -kmax; k <= kmax; ++k) {
        const double a = k * dx - 0.5 * dx, b = k * dx + 0.5 * dx;
        table.values[static_cast<std::size_t>(k + kmax)] = gauss5(W.f, a, b) / dx;
    }
    for (int k = -kmax; k <= kmax; ++k)
        if (!std::isfinite(table.at(k)))
            throw std::runtime_error("build_kernel: non-finite kernel average at offset " +
                                     std::to_string(k));
    double asym = 0.0, scale = 0.0;
    for (int k = 1; k <= kmax; ++k) {
        asym = std::max(asym, std::abs(table.at(k) - table.at(-k)));
        scale = std::max(scale, std::abs(table.at(k)));
    }
    table.symmetry_warning = asym > 1e-10 * (1.0 + scale);
    return table;
}

CellField convolve_serial(const KernelTable& table, const CellField& rho) {
    if (!(table.mesh == rho.mesh))
        throw std::invalid_argument("convolve: kernel table and field use different meshes");
    CellField out(rho.mesh);
    const int n = rho.size();
    const double dx = rho.mesh.dx;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += table.at(i - j) * rho[j];
        out[i] = s * dx;
    }
    return out;
}

CellField convolve(const KernelTable& table, const CellField& rho) {
    if (!(table.mesh == rho.mesh))
        throw std::invalid_argument("convolve: kernel table and field use different meshes");
    CellField out(rho.mesh);
    const int n = rho.size();
    const double dx = rho.mesh.dx;
#pragma omp parallel for schedule(static) if (n >= 256)
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += table.at(i - j) * rho[j];
        out[i] = s * dx;
    }
    return out;
}

DefinitenessReport kernel_definiteness(const KernelTable& table) {
    const int n = table.mesh.cell_count();
    Eigen::MatrixXd T(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) T(i, j) = table.at(i - j);
    const Eigen::MatrixXd S = 0.5 * (T + T.transpose());

    DefinitenessReport report;
    report.symmetry_warning = table.symmetry_warning;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    report.min_eigenvalue = ev.minCoeff();
    report.max_eigenvalue = ev.maxCoeff();

    const double norm_inf = T.cwiseAbs().rowwise().sum().maxCoeff();
    const double tol = 1e-10 * (norm_inf > 0.0 ? norm_inf : 1.0);
    const bool nonneg = report.min_eigenvalue >= -tol;
    const bool nonpos = report.max_eigenvalue <= tol;
    if (nonneg && nonpos) {
        report.classification = Definiteness::PositiveSemidefinite;
        report.degenerate = true;
    } else if (nonneg) {
        report.classification = Definiteness::PositiveSemidefinite;
    } else if (nonpos) {
        report.classification = Definiteness::NegativeSemidefinite;
    } else {
        report.classification = Definiteness::Indefinite;
    }
    return report;
}

}  // namespace adfv
