// Compares the serial reference grid runner against the OpenMP one on a
// reduced study and verifies the reports agree byte for byte.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "gammareg/simulation.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace gammareg;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

int main(int argc, char** argv) {
    ScenarioGrid grid;
    grid.zetas = {0.25};
    grid.ns = {25, 50};
    grid.rhos = {0.8, 0.99};
    grid.replications = 20;
    grid.mcmc_iters = 4000;
    grid.mcmc_burn_in = 500;
    grid.base_seed = 7;

    int threads = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--replications" && i + 1 < argc) grid.replications = std::atoi(argv[++i]);
        if (arg == "--threads" && i + 1 < argc) threads = std::atoi(argv[++i]);
    }

    std::printf("grid: %zu cells x %d replications, chains %d/%d\n",
                grid.zetas.size() * grid.ns.size() * grid.rhos.size(), grid.replications,
                grid.mcmc_iters, grid.mcmc_burn_in);

    auto t0 = std::chrono::steady_clock::now();
    const ScenarioReport serial = run_grid_serial(grid);
    const double serial_s = seconds_since(t0);
    std::printf("serial reference : %8.2f s\n", serial_s);

    t0 = std::chrono::steady_clock::now();
    const ScenarioReport parallel = run_grid(grid, threads);
    const double parallel_s = seconds_since(t0);
#ifdef _OPENMP
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#else
    const int nt = 1;
#endif
    std::printf("openmp (%2d thr)  : %8.2f s   speedup %.2fx\n", nt, parallel_s,
                serial_s / parallel_s);

    const int p = static_cast<int>(grid.beta_true.size());
    if (report_to_csv(serial, p) != report_to_csv(parallel, p)) {
        std::printf("MISMATCH: parallel report differs from serial reference\n");
        return 1;
    }
    std::printf("reports identical\n");
    return 0;
}
