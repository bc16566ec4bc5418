#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "varma/estimate.hpp"
#include "varma/model.hpp"

namespace varma {

enum class ModelKind { VAR1, VMA1, VARMA11 };
enum class ContKind { CLEAN, AO, IO };
enum class SubsetMode { Oracle, HuberSkip };

// The bivariate design shared by all experiments: innovation covariance
// [[1, 0.2], [0.2, 1]] and coefficient A = [[0.7, 0], [0.3, 0.7]] placed on
// the AR side, the MA side, or both.
VarmaModel design_model(ModelKind kind);

// One Monte Carlo cell-set: a (model, T, alpha, zeta, kind) combination
// evaluated at every kappa in kappa_list over m replications.
struct ExperimentConfig {
    ModelKind model = ModelKind::VAR1;
    int T = 500;
    double alpha = 0.1;
    double zeta = 50.0;
    ContKind kind = ContKind::AO;
    std::vector<int> kappa_list = {0, 1};
    int replications = 200;
    std::uint64_t base_seed = 1;
    SubsetMode subset_mode = SubsetMode::Oracle;
    int burn_in = 500;
    int guard = 0;

    void validate() const;
};

struct AggregateRow {
    ContKind kind = ContKind::CLEAN;
    double zeta = 0.0;
    double alpha = 0.0;
    int T = 0;
    int kappa = 0;
    double bias = 0.0;
    double rmse = 0.0;
    int m_effective = 0;  // replications whose fit converged
};

// Total bias and RMSE over replications:
//   bias = || mean error vector ||_2,  rmse = sqrt(sum_j mean(error_j^2)).
std::pair<double, double> bias_rmse(const std::vector<Vector>& estimates, const Vector& truth);

// Per-replication estimates for one kappa; entries are empty (size 0) for
// replications whose fit did not converge. Exposed for the bitwise
// clean-vs-AO comparisons in the tests.
std::vector<Vector> replication_estimates(const ExperimentConfig& config, int kappa,
                                          bool parallel);

// Runs the experiment, one result row per kappa in kappa_list. The parallel
// path distributes replications over OpenMP threads; each replication is
// seeded as base_seed xor index, so the aggregate is identical to the serial
// reference to the last bit.
std::vector<AggregateRow> run_experiment(const ExperimentConfig& config);

// Serial reference implementation, kept for testing against the parallel path.
std::vector<AggregateRow> run_experiment_serial(const ExperimentConfig& config);

enum class TableFormat { Csv, Markdown };

// Pivots result rows into the paper's panel layout: one row per (zeta, alpha),
// one column per (T, kind, kappa), one panel per metric (bias, rmse,
// m_effective). CSV carries full precision; markdown rounds to 4 decimals.
std::string emit_table(const std::vector<AggregateRow>& results, TableFormat format);

const char* to_string(ContKind kind);
const char* to_string(ModelKind kind);

}  // namespace varma
