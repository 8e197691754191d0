#pragma once

#include <string>
#include <vector>

#include "adfv/grid.hpp"
#include "adfv/model.hpp"

namespace adfv {

/// Offset table W_k = avg over C_j of W(x_i - s) for k = i - j; on a uniform
/// mesh this depends on k only, with offsets -(2M-1) .. (2M-1).
struct KernelTable {
    Mesh mesh;
    std::vector<double> values;  // index k + (2M-1)
    bool symmetry_warning = false;  // set when |W_k - W_{-k}| exceeds tolerance

    int max_offset() const { return mesh.cell_count() - 1; }
    double at(int k) const { return values[static_cast<std::size_t>(k + max_offset())]; }

    bool is_zero() const {
        for (double v : values)
            if (v != 0.0) return false;
        return true;
    }
};

enum class Definiteness { PositiveSemidefinite, NegativeSemidefinite, Indefinite };

std::string to_string(Definiteness d);

struct DefinitenessReport {
    Definiteness classification = Definiteness::Indefinite;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    bool degenerate = false;         // both signs vanish (zero kernel)
    bool symmetry_warning = false;   // symmetric part was used
};

/// Average of f over cell i (0-based) by 5-node Gauss-Legendre quadrature.
double cell_average(const ScalarFn& f, int cell, const Mesh& mesh);

/// Cell averages of the initial datum; rejects materially negative averages.
CellField discretize_initial(const ScalarFn& rho0, const Mesh& mesh);

/// Cell averages of a potential V.
CellField discretize_potential(const Potential& V, const Mesh& mesh);

KernelTable build_kernel(const Potential& W, const Mesh& mesh);

/// (W * rho)_i = sum_j W_{i-j} rho_j dx; direct O(M^2), OpenMP-parallel.
CellField convolve(const KernelTable& table, const CellField& rho);

/// Serial reference implementation kept for testing the parallel kernel.
CellField convolve_serial(const KernelTable& table, const CellField& rho);

/// Classify the symmetric part of the Toeplitz matrix T_ij = W_{i-j} by its
/// extreme eigenvalues (tolerance 1e-10 * ||T||_inf).
DefinitenessReport kernel_definiteness(const KernelTable& table);

}  // namespace adfv
