#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace adfv {

/// Uniform primal mesh on (-L, L): 2M cells of width dx = L/M.
/// Cell centers x_i = -L + dx*(i - 1/2) for i = 1..2M (1-based in the docs,
/// 0-based in storage). Interior interfaces sit at x_{i+1/2} = -L + i*dx.
struct Mesh {
    double half_length = 1.0;  // L
    int half_cells = 1;        // M
    double dx = 1.0;

    Mesh() = default;
    Mesh(double L, int M);

    int cell_count() const { return 2 * half_cells; }
    int face_count() const { return 2 * half_cells - 1; }  // interior faces only

    /// Center of cell i, 0-based.
    double cell_center(int i) const { return -half_length + dx * (i + 0.5); }
    /// Left edge of cell i, 0-based.
    double cell_left(int i) const { return -half_length + dx * i; }
    double cell_right(int i) const { return -half_length + dx * (i + 1); }
    /// Interior interface f (0-based, f = 0 .. 2M-2) at x_{f+3/2 - 1} = -L + (f+1)*dx.
    double face_position(int f) const { return -half_length + dx * (f + 1); }

    bool operator==(const Mesh& o) const {
        return half_length == o.half_length && half_cells == o.half_cells;
    }
};

/// Uniform partition of [0, T] into N+1 intervals of length dt.
struct TimeGrid {
    double horizon = 1.0;  // T
    int intervals = 1;     // N+1
    double dt = 1.0;

    TimeGrid() = default;
    TimeGrid(double T, int n_intervals);
};

/// One value per primal cell (density, entropy variable, discrete potential, ...).
struct CellField {
    Mesh mesh;
    std::vector<double> values;

    CellField() = default;
    explicit CellField(const Mesh& m, double fill = 0.0)
        : mesh(m), values(static_cast<std::size_t>(m.cell_count()), fill) {}

    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
};

/// One value per interior interface (velocity, flux, discrete gradient).
/// The boundary interfaces x_{1/2} and x_{2M+1/2} carry an implicit 0 and are
/// not stored; this encodes the no-flux condition F_{1/2} = F_{2M+1/2} = 0.
struct FaceField {
    Mesh mesh;
    std::vector<double> values;

    FaceField() = default;
    explicit FaceField(const Mesh& m, double fill = 0.0)
        : mesh(m), values(static_cast<std::size_t>(m.face_count()), fill) {}

    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int f) { return values[static_cast<std::size_t>(f)]; }
    double operator[](int f) const { return values[static_cast<std::size_t>(f)]; }

    /// Value at the interface left of cell i, with the zero boundary extension.
    double left_of(int i) const { return i == 0 ? 0.0 : values[static_cast<std::size_t>(i - 1)]; }
    /// Value at the interface right of cell i, with the zero boundary extension.
    double right_of(int i) const {
        return i == static_cast<int>(values.size()) ? 0.0 : values[static_cast<std::size_t>(i)];
    }
};

/// Snapshots of a run, one CellField per stored time index.
struct Trajectory {
    TimeGrid time;
    int snapshot_cadence = 1;           // every k-th step is stored; 0 and final always
    std::vector<int> snapshot_steps;    // time index n of each stored snapshot
    std::vector<CellField> snapshots;

    int count() const { return static_cast<int>(snapshots.size()); }
    const CellField& at(int k) const { return snapshots[static_cast<std::size_t>(k)]; }
};

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

Mesh build_mesh(double L, int M);
TimeGrid build_time_grid(double T, int n_intervals);

/// (f_{i+1} - f_i)/dx at each interior interface.
FaceField face_gradient(const CellField& f);

/// (g_{i+1/2} - g_{i-1/2})/dx per cell, with zero boundary values.
CellField cell_divergence(const FaceField& g);

/// Discrete L^p norm (sum |f_i|^p dx)^{1/p}; max |f_i| for p = infinity.
double lp_norm(const CellField& f, double p);
double lp_norm(const FaceField& f, double p);

/// Space-time L^p norm over snapshots weighted by dt (p < infinity) or the
/// overall sup (p = infinity). Every snapshot counts one time interval.
double lp_norm_space_time(const std::vector<CellField>& snaps, double dt, double p);

/// Kahan-compensated sum; norms and mass sums accumulate through this.
double compensated_sum(const std::vector<double>& terms);

double mass(const CellField& f);

double sup_diff(const CellField& a, const CellField& b);

}  // namespace adfv
