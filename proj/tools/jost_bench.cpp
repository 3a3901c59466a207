// Benchmark of the OpenMP Jost solver against the serial reference.
// Usage: jost_bench [half_width n_points band_limit m_points]
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "nlslab/jost.hpp"

using namespace nlslab;

int main(int argc, char** argv) {
    double L = argc > 1 ? std::atof(argv[1]) : 100.0;
    int n = argc > 2 ? std::atoi(argv[2]) : 2048;
    double K = argc > 3 ? std::atof(argv[3]) : 8.0;
    int m = argc > 4 ? std::atoi(argv[4]) : 512;

    SpatialGrid grid(L, n);
    FrequencyGrid kgrid(K, m);
    Potential V = Potential::gaussian_well(1.0, 1.0);

    auto time = [&](auto&& fn) {
        auto t0 = std::chrono::steady_clock::now();
        JostSolution j = fn(V, grid, kgrid);
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return std::pair<double, JostSolution>(s, std::move(j));
    };

    auto [t_serial, js] = time([](auto&... a) { return solve_jost_serial(a...); });
    auto [t_par, jp] = time([](auto&... a) { return solve_jost(a...); });

    double diff = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            diff = std::max(diff, std::abs(js.at(i).m_plus[j] - jp.at(i).m_plus[j]));
            diff = std::max(diff, std::abs(js.at(i).m_minus[j] - jp.at(i).m_minus[j]));
        }

    std::printf("grid L=%g n=%d, band K=%g m=%d, threads=%d\n", L, n, K, m,
                omp_get_max_threads());
    std::printf("serial   %8.3f s\n", t_serial);
    std::printf("parallel %8.3f s  (speedup %.2fx)\n", t_par, t_serial / t_par);
    std::printf("max |serial - parallel| = %.3g\n", diff);
    return diff < 1e-12 ? 0 : 1;
}
