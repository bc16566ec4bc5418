#pragma once

#include <vector>

#include "varma/model.hpp"

namespace varma::detail {

// Conditional residual recursion shared by the process module and the
// optimizer objective:
//   E(t) = x(t) - sum_i Phi_i x(t-i) - sum_j Theta_j E(t-j),
// zero presample. Plain scalar loops: the matrices are tiny and this sits
// inside the criterion evaluation, so per-call overhead matters more than
// vectorization. E is resized to T x d.
inline void filter_residuals(const Matrix& x, const std::vector<Matrix>& phi,
                             const std::vector<Matrix>& theta, Matrix& E) {
    const int T = static_cast<int>(x.rows());
    const int d = static_cast<int>(x.cols());
    const int p = static_cast<int>(phi.size());
    const int q = static_cast<int>(theta.size());
    E.resize(T, d);
    for (int t = 0; t < T; ++t) {
        for (int r = 0; r < d; ++r) {
            double acc = x(t, r);
            for (int i = 1; i <= std::min(t, p); ++i) {
                const Matrix& c = phi[i - 1];
                for (int k = 0; k < d; ++k) acc -= c(r, k) * x(t - i, k);
            }
            for (int j = 1; j <= std::min(t, q); ++j) {
                const Matrix& c = theta[j - 1];
                for (int k = 0; k < d; ++k) acc -= c(r, k) * E(t - j, k);
            }
            E(t, r) = acc;
        }
    }
}

}  // namespace varma::detail
