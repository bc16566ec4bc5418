#include "varma/process.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "varma/detail/filter.hpp"
#include "varma/lagpoly.hpp"
#include "varma/rng.hpp"

namespace varma {

namespace {

// Innovation transform L with L L' = sigma. Cholesky when positive definite;
// eigenvalue square root with negatives floored at zero when semidefinite.
// Genuinely indefinite sigma is rejected.
Matrix innovation_transform(const Matrix& sigma) {
    const int d = static_cast<int>(sigma.rows());
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + sigma.cwiseAbs().maxCoeff()))
        throw model_error("simulate: sigma is not symmetric");

    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() == Eigen::Success) return llt.matrixL();

    Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
    const Vector evals = es.eigenvalues();
    const double scale = std::max(1.0, std::abs(evals(d - 1)));
    if (evals(0) < -1e-10 * scale)
        throw model_error("simulate: sigma is not PSD (eigenvalue " +
                          std::to_string(evals(0)) + ")");
    Vector root = evals.cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal();
}

}  // namespace

SimulationResult simulate(const VarmaModel& model, int T, int burn_in, std::uint64_t seed) {
    model.validate();
    if (T < 1) throw dimension_error("simulate: T must be >= 1");
    if (burn_in < 0) throw dimension_error("simulate: burn_in must be >= 0");
    const CausalityReport report = check_causal_invertible(model);
    if (!report.causal)
        throw model_error("simulate: model is not causal (max AR root modulus " +
                          std::to_string(report.max_ar_root_modulus) + ")");

    const int d = model.d;
    const Matrix transform = innovation_transform(model.sigma);
    const int total = burn_in + T;

    SplitMix64 rng(seed);
    Matrix eps(total, d);
    Vector z(d);
    for (int t = 0; t < total; ++t) {
        for (int i = 0; i < d; ++i) z(i) = rng.gaussian();
        eps.row(t) = (transform * z).transpose();
    }

    Matrix x = Matrix::Zero(total, d);
    for (int t = 0; t < total; ++t) {
        Vector xt = eps.row(t).transpose();
        for (int i = 1; i <= model.p; ++i)
            if (t - i >= 0) xt += model.phi[i - 1] * x.row(t - i).transpose();
        for (int j = 1; j <= model.q; ++j)
            if (t - j >= 0) xt += model.theta[j - 1] * eps.row(t - j).transpose();
        x.row(t) = xt.transpose();
    }

    SimulationResult result;
    result.series.values = x.bottomRows(T);
    result.series.origin = SeriesOrigin::Clean;
    result.innovations.values = eps.bottomRows(T);
    result.innovations.origin = SeriesOrigin::Clean;
    return result;
}

ResidualSeries residuals(const TimeSeries& series, const VarmaModel& params) {
    params.validate();
    if (series.dim() != params.d)
        throw dimension_error("residuals: series dimension does not match parameters");

    ResidualSeries out;
    out.params = params;
    detail::filter_residuals(series.values, params.phi, params.theta, out.values);
    return out;
}

ResidualSeries residuals_centered(const TimeSeries& series, const VarmaModel& params,
                                  const Vector& center) {
    if (center.size() != series.dim())
        throw dimension_error("residuals_centered: center dimension mismatch");
    TimeSeries centered = series;
    centered.values.rowwise() -= center.transpose();
    return residuals(centered, params);
}

}  // namespace varma
