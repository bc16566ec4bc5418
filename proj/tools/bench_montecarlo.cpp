// Compares the OpenMP replication loop against the serial reference on a
// mid-size experiment and checks that both produce identical aggregates.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "varma/montecarlo.hpp"

using clock_type = std::chrono::steady_clock;

int main(int argc, char** argv) {
    int replications = 64;
    if (argc > 1) replications = std::atoi(argv[1]);

    varma::ExperimentConfig config;
    config.model = varma::ModelKind::VAR1;
    config.T = 500;
    config.alpha = 0.1;
    config.zeta = 50.0;
    config.kind = varma::ContKind::AO;
    config.kappa_list = {0, 1};
    config.replications = replications;
    config.base_seed = 987654321;

    const auto t0 = clock_type::now();
    const auto serial = varma::run_experiment_serial(config);
    const auto t1 = clock_type::now();
    const auto parallel = varma::run_experiment(config);
    const auto t2 = clock_type::now();

    const double serial_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    const double parallel_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();

    bool identical = serial.size() == parallel.size();
    for (std::size_t i = 0; identical && i < serial.size(); ++i)
        identical = serial[i].bias == parallel[i].bias && serial[i].rmse == parallel[i].rmse &&
                    serial[i].m_effective == parallel[i].m_effective;

    int threads = 1;
#ifdef _OPENMP
#pragma omp parallel
#pragma omp single
    threads = omp_get_num_threads();
#endif

    std::printf("replications: %d\n", replications);
    std::printf("serial:   %.1f ms\n", serial_ms);
    std::printf("parallel: %.1f ms (%d threads, speedup %.2fx)\n", parallel_ms, threads,
                serial_ms / parallel_ms);
    std::printf("results identical: %s\n", identical ? "yes" : "NO");
    for (const auto& row : serial)
        std::printf("  kappa=%d bias=%.4f rmse=%.4f m_eff=%d\n", row.kappa, row.bias, row.rmse,
                    row.m_effective);
    return identical ? 0 : 1;
}
