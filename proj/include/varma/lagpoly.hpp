#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "varma/model.hpp"

namespace varma {

// Which side of the VARMA sign convention a polynomial lives on:
// AR acts as I - sum C_i L^i, MA acts as I + sum C_j L^j.
enum class PolySide { AR, MA };

// Matrix lag polynomial of a given side. coeffs[i] is the matrix at lag i+1.
struct LagPolynomial {
    PolySide side = PolySide::AR;
    int d = 0;
    std::vector<Matrix> coeffs;

    int degree() const { return static_cast<int>(coeffs.size()); }

    // Matrix at lag k, including the implicit lag-0 identity and the side sign.
    Matrix at(int k) const {
        if (k == 0) return Matrix::Identity(d, d);
        if (k > degree()) return Matrix::Zero(d, d);
        return side == PolySide::AR ? Matrix(-coeffs[k - 1]) : coeffs[k - 1];
    }
};

inline LagPolynomial ar_polynomial(const VarmaModel& m) {
    return LagPolynomial{PolySide::AR, m.d, m.phi};
}
inline LagPolynomial ma_polynomial(const VarmaModel& m) {
    return LagPolynomial{PolySide::MA, m.d, m.theta};
}

// Truncated power series Pi_0..Pi_K with Pi_0 = I.
struct PowerSeries {
    std::vector<Matrix> coeffs;  // K+1 matrices
    bool truncation_warning = false;  // set when K < max(p,q) of the source model

    int truncation() const { return static_cast<int>(coeffs.size()) - 1; }
    int dim() const { return coeffs.empty() ? 0 : static_cast<int>(coeffs[0].rows()); }
    const Matrix& at(int k) const { return coeffs[static_cast<std::size_t>(k)]; }
};

// Geometric envelope |Pi_j| <= M R^j in spectral norm.
struct DecayBound {
    double M = 0.0;
    double R = 0.0;
};

struct CausalityReport {
    bool causal = false;
    bool invertible = false;
    double max_ar_root_modulus = 0.0;
    double max_ma_root_modulus = 0.0;
};

struct KappaSuggestion {
    int kappa = 0;
    bool feasible = true;  // false when alpha * (kappa + 1) >= 1
};

// Spectral norm (largest singular value).
double spectral_norm(const Matrix& m);

// Largest eigenvalue modulus of the companion matrix of the coefficient list
// (interpreted as x_t = sum C_i x_{t-i}); 0 for an empty list.
double companion_max_root_modulus(const std::vector<Matrix>& coeffs, int d);

// Roots are checked through companion-matrix eigenvalues; a side is accepted
// when its largest root modulus is <= 1 - margin.
CausalityReport check_causal_invertible(const VarmaModel& model, double margin = 0.01);

// Expansion of pi(L) = theta^{-1}(L) phi(L) to lag K via the matrix recursion
// implied by theta(L) pi(L) = phi(L). Requires an invertible model.
PowerSeries expand_pi(const VarmaModel& model, int K, double margin = 0.01);

// Expansion of psi(L) = phi^{-1}(L) theta(L) to lag K. Requires a causal model.
PowerSeries expand_psi(const VarmaModel& model, int K, double margin = 0.01);

// Product of two truncated series, itself truncated at K.
PowerSeries convolve_series(const PowerSeries& a, const PowerSeries& b, int K);

// Product lagpoly * series truncated at K (for the convolution-identity checks).
std::vector<Matrix> multiply_poly_series(const LagPolynomial& poly, const PowerSeries& series,
                                         int K);

// Ratio fit of the geometric envelope: R is the largest successive-norm ratio
// over the tail half of the series (floored at 1e-6), M = max_j |Pi_j| / R^j.
// Throws model_error when the tail does not decay (estimated R >= 1).
DecayBound fit_decay_bound(const PowerSeries& series);

// Smallest kappa with alpha * T * zeta_max * M * R^kappa <= tol. Sets the
// infeasibility flag when alpha * (kappa + 1) >= 1. finite_memory_p, when
// given, bypasses the bound and returns kappa = p (pure VAR(p) elimination).
KappaSuggestion suggest_kappa(const DecayBound& bound, double alpha, int T, double zeta_max,
                              double tol, std::optional<int> finite_memory_p = std::nullopt);

// Default truncation horizon for internal expansions: long enough to cover
// the model orders plus any patch length in play.
inline int default_expansion_truncation(int p, int q, int kappa) {
    return std::max(50, p + q + kappa);
}

}  // namespace varma
