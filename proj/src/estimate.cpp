#include "varma/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "varma/detail/filter.hpp"
#include "varma/lagpoly.hpp"
#include "varma/process.hpp"

namespace varma {

namespace {

constexpr double kHugeValue = 1e100;  // stands in for non-evaluable criteria

// log det of the uncentered residual moment matrix over H. Returns NaN for a
// singular or non-finite moment instead of throwing; the strict wrappers
// turn NaN into degenerate_error, the optimizer turns it into kHugeValue.
double criterion_from_matrix(const Matrix& E, const IndexSet& H) {
    const int d = static_cast<int>(E.cols());
    Matrix moment = Matrix::Zero(d, d);
    for (int t : H.members) moment.noalias() += E.row(t - 1).transpose() * E.row(t - 1);
    moment /= static_cast<double>(H.size());
    if (!moment.allFinite()) return std::numeric_limits<double>::quiet_NaN();
    const double det = moment.determinant();
    if (!std::isfinite(det) || det <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return std::log(det);
}

void mean_over_subset(const Matrix& x, const IndexSet& H, Vector& out) {
    const int d = static_cast<int>(x.cols());
    out = Vector::Zero(d);
    for (int t : H.members) out += x.row(t - 1).transpose();
    out /= static_cast<double>(H.size());
}

// Deterministic Nelder-Mead on a plain vector objective. Standard
// coefficients (reflect 1, expand 2, contract 1/2, shrink 1/2); ties in the
// vertex ordering break by vertex index so the path is reproducible.
struct NmResult {
    Vector x;
    double f = 0.0;
    int evals = 0;
    bool converged = false;
};

NmResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0, double step,
                     double ftol, double xtol, int max_evals,
                     std::vector<std::pair<int, double>>* trace) {
    const int n = static_cast<int>(x0.size());
    NmResult result;

    std::vector<Vector> xs(static_cast<std::size_t>(n) + 1, x0);
    std::vector<double> fs(static_cast<std::size_t>(n) + 1);
    for (int i = 1; i <= n; ++i) xs[i](i - 1) += step;
    int evals = 0;
    for (int i = 0; i <= n; ++i) fs[i] = (++evals, f(xs[i]));

    std::vector<int> order(static_cast<std::size_t>(n) + 1);
    auto sort_order = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return fs[a] < fs[b]; });
    };
    sort_order();

    bool converged = false;
    while (evals < max_evals) {
        const int best = order[0];
        const int worst = order[n];
        const int second_worst = order[n - 1];

        double diam = 0.0;
        for (int i = 0; i <= n; ++i)
            diam = std::max(diam, (xs[i] - xs[best]).cwiseAbs().maxCoeff());
        if (fs[worst] - fs[best] < ftol && diam < xtol) {
            converged = true;
            break;
        }
        if (trace) trace->emplace_back(evals, fs[best]);

        Vector centroid = Vector::Zero(n);
        for (int i = 0; i <= n; ++i)
            if (i != worst) centroid += xs[i];
        centroid /= static_cast<double>(n);

        const Vector xr = centroid + (centroid - xs[worst]);
        const double fr = (++evals, f(xr));

        if (fr < fs[best]) {
            const Vector xe = centroid + 2.0 * (centroid - xs[worst]);
            const double fe = (++evals, f(xe));
            if (fe < fr) {
                xs[worst] = xe;
                fs[worst] = fe;
            } else {
                xs[worst] = xr;
                fs[worst] = fr;
            }
        } else if (fr < fs[second_worst]) {
            xs[worst] = xr;
            fs[worst] = fr;
        } else {
            bool shrink = false;
            if (fr < fs[worst]) {
                const Vector xc = centroid + 0.5 * (centroid - xs[worst]);
                const double fc = (++evals, f(xc));
                if (fc <= fr) {
                    xs[worst] = xc;
                    fs[worst] = fc;
                } else {
                    shrink = true;
                }
            } else {
                const Vector xc = centroid - 0.5 * (centroid - xs[worst]);
                const double fc = (++evals, f(xc));
                if (fc < fs[worst]) {
                    xs[worst] = xc;
                    fs[worst] = fc;
                } else {
                    shrink = true;
                }
            }
            if (shrink) {
                for (int i = 0; i <= n; ++i) {
                    if (i == order[0]) continue;
                    xs[i] = xs[order[0]] + 0.5 * (xs[i] - xs[order[0]]);
                    fs[i] = (++evals, f(xs[i]));
                }
            }
        }
        sort_order();
    }

    sort_order();
    result.x = xs[order[0]];
    result.f = fs[order[0]];
    result.evals = evals;
    result.converged = converged;
    return result;
}

}  // namespace

double criterion(const ResidualSeries& residuals, const IndexSet& H) {
    if (H.size() < residuals.dim())
        throw dimension_error("criterion: |H| must be at least the dimension");
    const double value = criterion_from_matrix(residuals.values, H);
    if (!std::isfinite(value))
        throw degenerate_error("criterion: singular residual moment matrix");
    return value;
}

double criterion_at(const TimeSeries& series, const VarmaModel& candidate, const IndexSet& H) {
    return criterion(residuals(series, candidate), H);
}

FitResult fit(const TimeSeries& series, int p, int q, const IndexSet& H, const FitOptions& opts) {
    opts.validate();
    H.validate();
    series.validate();
    const int d = series.dim();
    const int n_params = d * d * (p + q);
    if (opts.init.d != d || opts.init.p != p || opts.init.q != q)
        throw dimension_error("fit: init model orders do not match");
    if (H.T != series.length()) throw dimension_error("fit: H ambient length mismatch");
    if (H.size() <= n_params + d)
        throw selection_collapse_error("fit: |H| = " + std::to_string(H.size()) +
                                       " too small for " + std::to_string(n_params) +
                                       " dynamic parameters");

    FitResult result;
    result.h_used = H;
    result.center = Vector::Zero(d);

    Matrix x = series.values;
    if (opts.demean) {
        mean_over_subset(series.values, H, result.center);
        x.rowwise() -= result.center.transpose();
    }

    // Strict evaluation at the initial point: a degenerate criterion here is
    // an input error, not a search failure.
    {
        Matrix e0;
        detail::filter_residuals(x, opts.init.phi, opts.init.theta, e0);
        const double f0 = criterion_from_matrix(e0, H);
        if (!std::isfinite(f0))
            throw degenerate_error("fit: criterion degenerate at the initial parameter");
    }

    if (n_params == 0) {
        Matrix e0;
        detail::filter_residuals(x, opts.init.phi, opts.init.theta, e0);
        result.params = opts.init;
        result.criterion_value = criterion_from_matrix(e0, H);
        result.converged = true;
        result.n_criterion_evals = 1;
        return result;
    }

    const double stable_cap = 1.0 - opts.stability_margin;
    int eval_count = 0;
    Matrix workspace;
    VarmaModel candidate = opts.init;
    auto objective = [&](const Vector& v) -> double {
        ++eval_count;
        int k = 0;
        for (int i = 0; i < p; ++i)
            for (int c = 0; c < d; ++c)
                for (int r = 0; r < d; ++r) candidate.phi[i](r, c) = v[k++];
        for (int j = 0; j < q; ++j)
            for (int c = 0; c < d; ++c)
                for (int r = 0; r < d; ++r) candidate.theta[j](r, c) = v[k++];

        double penalty = 0.0;
        if (p > 0) {
            const double m = companion_max_root_modulus(candidate.phi, d);
            if (m > stable_cap) penalty += opts.penalty_scale * (m - stable_cap) * (m - stable_cap);
        }
        if (q > 0) {
            const double m = companion_max_root_modulus(candidate.theta, d);
            if (m > stable_cap) penalty += opts.penalty_scale * (m - stable_cap) * (m - stable_cap);
        }

        detail::filter_residuals(x, candidate.phi, candidate.theta, workspace);
        const double value = criterion_from_matrix(workspace, H);
        if (!std::isfinite(value)) return kHugeValue + penalty;
        return value + penalty;
    };

    std::function<double(const Vector&)> obj = objective;
    Vector incumbent = opts.init.dynamic_params();
    NmResult nm = nelder_mead(obj, incumbent, opts.simplex_step, opts.criterion_tol,
                              opts.param_tol, opts.max_iter,
                              opts.record_trace ? &result.trace : nullptr);
    for (int r = 0; r < opts.restarts; ++r) {
        NmResult again = nelder_mead(obj, nm.x, opts.simplex_step * 0.1, opts.criterion_tol,
                                     opts.param_tol, opts.max_iter,
                                     opts.record_trace ? &result.trace : nullptr);
        const bool improved = again.f < nm.f - opts.criterion_tol;
        if (again.f <= nm.f) {
            nm.x = again.x;
            nm.f = again.f;
        }
        nm.converged = again.converged;
        if (!improved) break;
    }

    result.params = VarmaModel::from_dynamic_params(d, p, q, nm.x, opts.init.sigma);
    result.criterion_value = nm.f;
    result.n_criterion_evals = eval_count;
    result.converged = nm.converged;
    if (result.converged) {
        // The reported optimum must itself be causal and invertible at the
        // stated margin; a solution stuck beyond the barrier is not accepted.
        const CausalityReport report =
            check_causal_invertible(result.params, opts.stability_margin);
        if ((p > 0 && !report.causal) || (q > 0 && !report.invertible))
            result.converged = false;
    }
    return result;
}

FitResult patch_estimator(const TimeSeries& series, int p, int q, const IndexSet& H, int kappa,
                          const FitOptions& opts) {
    const IndexSet reduced = patch_remove(H, kappa);
    const int d = series.dim();
    if (reduced.size() <= d * d * (p + q) + d)
        throw selection_collapse_error("patch_estimator: S^kappa H has only " +
                                       std::to_string(reduced.size()) + " indices");
    return fit(series, p, q, reduced, opts);
}

std::pair<FitResult, IterationTrace> iterate_patch_removal(const TimeSeries& series, int p, int q,
                                                           double alpha, int kappa,
                                                           const FitOptions& opts, int max_outer) {
    if (alpha < 0 || alpha >= 0.5)
        throw dimension_error("iterate_patch_removal: alpha must be in [0, 0.5)");
    if (max_outer < 1) throw dimension_error("iterate_patch_removal: max_outer must be >= 1");
    const int d = series.dim();
    const int n_params = d * d * (p + q);
    const int warmup = std::max(p, q);

    IterationTrace trace;

    // Initial screening at the caller-supplied parameter. When demeaning,
    // the first pass centers on the full sample; later passes re-center on
    // the current retained subset.
    Vector center = Vector::Zero(d);
    if (opts.demean) center = series.values.colwise().mean().transpose();
    IndexSet H_current =
        huber_skip_select(residuals_centered(series, opts.init, center), alpha, warmup);

    FitOptions step_opts = opts;
    FitResult current = fit(series, p, q, H_current, step_opts);
    trace.steps.push_back({0, H_current, current.params});

    for (int m = 0; m < max_outer; ++m) {
        const ResidualSeries resid = residuals_centered(series, current.params, current.center);
        IndexSet H_next = huber_skip_select(resid, alpha, warmup);

        // Patches grow only from screened-out indices: the complement is
        // taken within the scoring window (warmup, T].
        const IndexSet reduced = patch_remove_within(H_next, kappa, warmup + 1);
        if (reduced.size() <= n_params + d)
            throw selection_collapse_error("iterate_patch_removal: retained subset collapsed to " +
                                           std::to_string(reduced.size()) + " indices");

        step_opts.init = current.params;
        FitResult next = fit(series, p, q, reduced, step_opts);
        trace.steps.push_back({m + 1, H_next, next.params});

        const bool fixed_point = H_next == H_current;
        H_current = std::move(H_next);
        current = std::move(next);
        if (fixed_point) {
            trace.terminated_by = Termination::FixedPoint;
            return {std::move(current), std::move(trace)};
        }
    }
    trace.terminated_by = Termination::MaxIterations;
    return {std::move(current), std::move(trace)};
}

LoglikResult gaussian_loglik(const ResidualSeries& residuals, const IndexSet& H) {
    const int d = residuals.dim();
    if (H.size() <= d) throw dimension_error("gaussian_loglik: |H| must exceed the dimension");

    LoglikResult out;
    out.sigma_hat = Matrix::Zero(d, d);
    for (int t : H.members)
        out.sigma_hat.noalias() +=
            residuals.values.row(t - 1).transpose() * residuals.values.row(t - 1);
    out.sigma_hat /= static_cast<double>(H.size());

    const double det = out.sigma_hat.determinant();
    if (!std::isfinite(det) || det <= 0.0)
        throw degenerate_error("gaussian_loglik: singular residual covariance");
    const double logdet = std::log(det);
    constexpr double kLog2Pi = 1.8378770664093454836;
    out.loglik = -0.5 * H.size() * (d * kLog2Pi + logdet + d);
    return out;
}

double aic_avg(double loglik, int k, int n_eff) {
    if (n_eff < 1) throw dimension_error("aic_avg: n_eff must be >= 1");
    return (-2.0 * loglik + 2.0 * k) / static_cast<double>(n_eff);
}

int aic_param_count(int d, int p, int q, bool demeaned) {
    return d * d * (p + q) + d * (d + 1) / 2 + (demeaned ? d : 0);
}

std::vector<ModelSelectionRow> select_model(const TimeSeries& series,
                                            const std::vector<std::pair<int, int>>& grid,
                                            double alpha, int kappa,
                                            const FitOptions& base_opts) {
    if (grid.empty()) throw config_error("select_model: empty grid");
    const int d = series.dim();
    const int T = series.length();

    std::vector<ModelSelectionRow> rows;
    rows.reserve(grid.size());
    for (const auto& [p, q] : grid) {
        ModelSelectionRow row;
        row.p = p;
        row.q = q;
        try {
            FitOptions opts = base_opts;
            opts.demean = true;
            std::vector<Matrix> phi0(static_cast<std::size_t>(p), Matrix::Zero(d, d));
            std::vector<Matrix> theta0(static_cast<std::size_t>(q), Matrix::Zero(d, d));
            opts.init = VarmaModel(d, phi0, theta0, Matrix::Identity(d, d));

            auto [patch_fit, trace] = iterate_patch_removal(series, p, q, alpha, kappa, opts);
            const int k = aic_param_count(d, p, q, true);
            const ResidualSeries patch_resid =
                residuals_centered(series, patch_fit.params, patch_fit.center);
            row.n_eff = patch_fit.h_used.size();
            row.aic_avg_patch =
                aic_avg(gaussian_loglik(patch_resid, patch_fit.h_used).loglik, k, row.n_eff);

            FitResult full_fit = fit(series, p, q, IndexSet::full(T), opts);
            const ResidualSeries full_resid =
                residuals_centered(series, full_fit.params, full_fit.center);
            row.aic_avg_full =
                aic_avg(gaussian_loglik(full_resid, IndexSet::full(T)).loglik, k, T);

            row.converged = patch_fit.converged && full_fit.converged;
            if (!row.converged) row.note = "optimizer did not converge";
        } catch (const error& e) {
            row.converged = false;
            row.n_eff = 0;
            row.aic_avg_patch = std::numeric_limits<double>::quiet_NaN();
            row.aic_avg_full = std::numeric_limits<double>::quiet_NaN();
            row.note = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace varma
