// Benchmark of the OpenMP convolution against the serial reference.
// Usage: bench_convolve [M] [repeats]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "adfv/discretize.hpp"
#include "adfv/model.hpp"

using namespace adfv;

namespace {

template <typename F>
double time_best_of(int repeats, F&& f) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (s < best) best = s;
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    const int M = argc > 1 ? std::atoi(argv[1]) : 2048;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;

    const Mesh mesh = build_mesh(1.0, M);
    const Potential W = gaussian_potential(1.0, 0.25);
    const KernelTable table = build_kernel(W, mesh);

    CellField rho(mesh);
    for (int i = 0; i < rho.size(); ++i) rho[i] = 1.0 + std::sin(3.0 * mesh.cell_center(i));

    CellField out_parallel(mesh), out_serial(mesh);
    const double t_parallel = time_best_of(repeats, [&] { out_parallel = convolve(table, rho); });
    const double t_serial =
        time_best_of(repeats, [&] { out_serial = convolve_serial(table, rho); });

    double max_diff = 0.0;
    for (int i = 0; i < rho.size(); ++i)
        max_diff = std::max(max_diff, std::abs(out_parallel[i] - out_serial[i]));

    std::printf("cells %d\n", mesh.cell_count());
    std::printf("serial   %.6f s\n", t_serial);
    std::printf("parallel %.6f s  (speedup %.2fx)\n", t_parallel, t_serial / t_parallel);
    std::printf("max |serial - parallel| = %.3e\n", max_diff);
    return max_diff < 1e-12 ? 0 : 1;
}
