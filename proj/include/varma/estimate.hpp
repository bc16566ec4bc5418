#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "varma/model.hpp"
#include "varma/subsample.hpp"

namespace varma {

struct FitOptions {
    VarmaModel init;               // starting parameter (orders must match the fit)
    int max_iter = 4000;           // criterion-evaluation budget per restart
    double criterion_tol = 1e-10;  // simplex value spread at convergence
    double param_tol = 1e-8;       // simplex diameter at convergence
    double stability_margin = 0.01;
    double penalty_scale = 1e4;    // weight of the root-modulus barrier
    double simplex_step = 0.1;     // initial simplex edge length
    int restarts = 2;              // re-seeded simplexes around the incumbent
    bool demean = false;           // center by the subset mean before filtering
    bool record_trace = false;

    void validate() const {
        if (criterion_tol <= 0 || param_tol <= 0)
            throw config_error("FitOptions: tolerances must be positive");
        if (stability_margin <= 0 || stability_margin >= 1)
            throw config_error("FitOptions: stability margin must be in (0,1)");
    }
};

struct FitResult {
    VarmaModel params;
    IndexSet h_used;
    double criterion_value = 0.0;
    bool converged = false;
    int n_criterion_evals = 0;
    Vector center;  // subtracted mean (zero vector unless demeaning)
    std::vector<std::pair<int, double>> trace;  // (evaluation count, best value)
};

struct IterationStep {
    int m = 0;
    IndexSet H;         // screening subset at this step
    VarmaModel params;  // estimate after this step
};

enum class Termination { FixedPoint, MaxIterations };

struct IterationTrace {
    std::vector<IterationStep> steps;
    Termination terminated_by = Termination::FixedPoint;
};

// log det of the uncentered second-moment matrix of the residuals over H.
// Throws degenerate_error when the moment matrix is singular.
double criterion(const ResidualSeries& residuals, const IndexSet& H);

// Same criterion evaluated for a candidate parameter vector on a series
// (residual filter + moment accumulation); used by fit and by tests that
// sweep parameter grids.
double criterion_at(const TimeSeries& series, const VarmaModel& candidate, const IndexSet& H);

// Minimizes criterion(residuals(series, phi), H) over the dynamic parameters
// by a deterministic Nelder-Mead simplex with a smooth penalty on companion
// roots beyond 1 - stability_margin. Results depend only on the inputs.
FitResult fit(const TimeSeries& series, int p, int q, const IndexSet& H, const FitOptions& opts);

// The patch removal estimator K^kappa: fit on S^kappa H.
FitResult patch_estimator(const TimeSeries& series, int p, int q, const IndexSet& H, int kappa,
                          const FitOptions& opts);

// Iterative feasible procedure: screen by Huber-skip, estimate on the
// patch-removed subset, repeat until the screening subset stabilizes
// (exact set equality) or max_outer passes elapse.
std::pair<FitResult, IterationTrace> iterate_patch_removal(const TimeSeries& series, int p, int q,
                                                           double alpha, int kappa,
                                                           const FitOptions& opts,
                                                           int max_outer = 50);

struct LoglikResult {
    double loglik = 0.0;
    Matrix sigma_hat;
};

// Gaussian log-likelihood from the residual moment matrix over H:
//   -(|H|/2) (d log 2 pi + log det Sigma_hat + d).
LoglikResult gaussian_loglik(const ResidualSeries& residuals, const IndexSet& H);

// AIC on a per-observation scale: (-2 loglik + 2 k) / n_eff.
double aic_avg(double loglik, int k, int n_eff);

// Parameters counted by the information criterion: dynamic coefficients,
// the symmetric innovation covariance, and the mean when demeaning.
int aic_param_count(int d, int p, int q, bool demeaned);

struct ModelSelectionRow {
    int p = 0;
    int q = 0;
    int n_eff = 0;
    double aic_avg_patch = 0.0;
    double aic_avg_full = 0.0;
    bool converged = false;
    std::string note;  // failure reason when not converged
};

// Runs the iterative procedure plus a full-sample fit for every (p,q) in the
// grid. Rows come back in grid order; failures are flagged, never dropped.
std::vector<ModelSelectionRow> select_model(const TimeSeries& series,
                                            const std::vector<std::pair<int, int>>& grid,
                                            double alpha, int kappa, const FitOptions& base_opts);

}  // namespace varma
