#include "varma/lagpoly.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace varma {

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

double companion_max_root_modulus(const std::vector<Matrix>& coeffs, int d) {
    const int n = static_cast<int>(coeffs.size());
    if (n == 0) return 0.0;
    bool all_zero = true;
    for (const Matrix& c : coeffs)
        if (c.cwiseAbs().maxCoeff() != 0.0) all_zero = false;
    if (all_zero) return 0.0;

    Matrix companion = Matrix::Zero(n * d, n * d);
    for (int i = 0; i < n; ++i) companion.block(0, i * d, d, d) = coeffs[i];
    for (int i = 1; i < n; ++i)
        companion.block(i * d, (i - 1) * d, d, d) = Matrix::Identity(d, d);

    Eigen::EigenSolver<Matrix> solver(companion, /*computeEigenvectors=*/false);
    double max_mod = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
        max_mod = std::max(max_mod, std::abs(solver.eigenvalues()(i)));
    return max_mod;
}

CausalityReport check_causal_invertible(const VarmaModel& model, double margin) {
    model.validate();
    CausalityReport report;
    report.max_ar_root_modulus = companion_max_root_modulus(model.phi, model.d);
    report.max_ma_root_modulus = companion_max_root_modulus(model.theta, model.d);
    report.causal = report.max_ar_root_modulus <= 1.0 - margin;
    report.invertible = report.max_ma_root_modulus <= 1.0 - margin;
    return report;
}

namespace {

// phi_k of the AR operator I - sum Phi_i L^i (phi_0 = I, phi_i = -Phi_i).
Matrix ar_coeff(const VarmaModel& m, int k) {
    if (k == 0) return Matrix::Identity(m.d, m.d);
    if (k <= m.p) return -m.phi[k - 1];
    return Matrix::Zero(m.d, m.d);
}

// theta_k of the MA operator I + sum Theta_j L^j.
Matrix ma_coeff(const VarmaModel& m, int k) {
    if (k == 0) return Matrix::Identity(m.d, m.d);
    if (k <= m.q) return m.theta[k - 1];
    return Matrix::Zero(m.d, m.d);
}

}  // namespace

PowerSeries expand_pi(const VarmaModel& model, int K, double margin) {
    if (K < 1) throw dimension_error("expand_pi: K must be positive");
    const CausalityReport report = check_causal_invertible(model, margin);
    if (!report.invertible)
        throw model_error("expand_pi: model is not invertible (max MA root modulus " +
                          std::to_string(report.max_ma_root_modulus) + ")");
    PowerSeries series;
    series.truncation_warning = K < std::max(model.p, model.q);
    series.coeffs.reserve(static_cast<std::size_t>(K) + 1);
    // theta(L) pi(L) = phi(L): Pi_k = phi_k - sum_{j=1..min(k,q)} Theta_j Pi_{k-j}
    for (int k = 0; k <= K; ++k) {
        Matrix pik = ar_coeff(model, k);
        for (int j = 1; j <= std::min(k, model.q); ++j)
            pik -= model.theta[j - 1] * series.coeffs[k - j];
        series.coeffs.push_back(std::move(pik));
    }
    return series;
}

PowerSeries expand_psi(const VarmaModel& model, int K, double margin) {
    if (K < 1) throw dimension_error("expand_psi: K must be positive");
    const CausalityReport report = check_causal_invertible(model, margin);
    if (!report.causal)
        throw model_error("expand_psi: model is not causal (max AR root modulus " +
                          std::to_string(report.max_ar_root_modulus) + ")");
    PowerSeries series;
    series.truncation_warning = K < std::max(model.p, model.q);
    series.coeffs.reserve(static_cast<std::size_t>(K) + 1);
    // phi(L) psi(L) = theta(L): Psi_k = theta_k + sum_{i=1..min(k,p)} Phi_i Psi_{k-i}
    for (int k = 0; k <= K; ++k) {
        Matrix psik = ma_coeff(model, k);
        for (int i = 1; i <= std::min(k, model.p); ++i)
            psik += model.phi[i - 1] * series.coeffs[k - i];
        series.coeffs.push_back(std::move(psik));
    }
    return series;
}

PowerSeries convolve_series(const PowerSeries& a, const PowerSeries& b, int K) {
    const int d = a.dim();
    PowerSeries out;
    out.coeffs.reserve(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) {
        Matrix ck = Matrix::Zero(d, d);
        for (int i = 0; i <= k; ++i) {
            if (i > a.truncation() || k - i > b.truncation()) continue;
            ck += a.at(i) * b.at(k - i);
        }
        out.coeffs.push_back(std::move(ck));
    }
    return out;
}

std::vector<Matrix> multiply_poly_series(const LagPolynomial& poly, const PowerSeries& series,
                                         int K) {
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) {
        Matrix ck = Matrix::Zero(poly.d, poly.d);
        for (int i = 0; i <= std::min(k, poly.degree()); ++i) {
            if (k - i > series.truncation()) continue;
            ck += poly.at(i) * series.at(k - i);
        }
        out.push_back(std::move(ck));
    }
    return out;
}

DecayBound fit_decay_bound(const PowerSeries& series) {
    const int K = series.truncation();
    if (K < 2) throw dimension_error("fit_decay_bound: need truncation K >= 2");

    std::vector<double> norms(static_cast<std::size_t>(K) + 1);
    for (int j = 0; j <= K; ++j) norms[j] = spectral_norm(series.at(j));

    constexpr double kFloor = 1e-6;
    double ratio_max = 0.0;
    bool ratio_seen = false;
    for (int j = K / 2; j < K; ++j) {
        if (norms[j] == 0.0) {
            if (norms[j + 1] != 0.0)
                throw model_error("fit_decay_bound: tail norm jumps from zero");
            continue;
        }
        ratio_max = std::max(ratio_max, norms[j + 1] / norms[j]);
        ratio_seen = true;
    }
    DecayBound bound;
    bound.R = ratio_seen ? std::max(ratio_max, kFloor) : kFloor;
    if (bound.R >= 1.0)
        throw model_error("fit_decay_bound: non-decaying tail (estimated R = " +
                          std::to_string(bound.R) + "), propagation is not contractive");

    double M = 0.0;
    double rpow = 1.0;
    for (int j = 0; j <= K; ++j) {
        if (norms[j] > 0.0) M = std::max(M, norms[j] / rpow);
        rpow *= bound.R;
    }
    if (!std::isfinite(M))
        throw model_error("fit_decay_bound: envelope constant overflows");
    bound.M = M;
    return bound;
}

KappaSuggestion suggest_kappa(const DecayBound& bound, double alpha, int T, double zeta_max,
                              double tol, std::optional<int> finite_memory_p) {
    if (tol <= 0) throw dimension_error("suggest_kappa: tol must be positive");
    if (alpha < 0 || alpha >= 0.5)
        throw dimension_error("suggest_kappa: alpha must be in [0, 0.5)");

    KappaSuggestion suggestion;
    if (finite_memory_p) {
        suggestion.kappa = *finite_memory_p;
        suggestion.feasible = alpha * (suggestion.kappa + 1) < 1.0;
        return suggestion;
    }
    if (bound.R >= 1.0)
        throw model_error("suggest_kappa: R >= 1, no finite kappa controls propagation");

    const double c = alpha * static_cast<double>(T) * zeta_max * bound.M;
    int kappa = 0;
    if (c > tol) {
        while (c * std::pow(bound.R, kappa) > tol) {
            ++kappa;
            if (kappa > 1000000)
                throw model_error("suggest_kappa: kappa search did not terminate");
        }
    }
    suggestion.kappa = kappa;
    suggestion.feasible = alpha * (kappa + 1) < 1.0;
    return suggestion;
}

}  // namespace varma
