#include "varma/subsample.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace varma {

IndexSet patch_remove_within(const IndexSet& H, int kappa, int lo) {
    H.validate();
    if (kappa < 0) throw dimension_error("patch_remove: kappa must be >= 0");
    const int T = H.T;

    std::vector<std::uint8_t> in_h(static_cast<std::size_t>(T) + 1, 0);
    for (int t : H.members) in_h[t] = 1;

    std::vector<std::uint8_t> removed(static_cast<std::size_t>(T) + 1, 0);
    for (int t = lo; t <= T; ++t) {
        if (in_h[t]) continue;  // t in the complement within {lo, .., T}
        const int hi = std::min(t + kappa, T);
        for (int s = t + 1; s <= hi; ++s) removed[s] = 1;
    }

    IndexSet out;
    out.T = T;
    for (int t : H.members)
        if (!removed[t]) out.members.push_back(t);
    return out;
}

IndexSet patch_remove(const IndexSet& H, int kappa) { return patch_remove_within(H, kappa, 1); }

IndexSet huber_skip_select(const ResidualSeries& residuals, double alpha, int warmup) {
    if (alpha < 0 || alpha >= 0.5)
        throw dimension_error("huber_skip_select: alpha must be in [0, 0.5)");
    if (warmup < 0) throw dimension_error("huber_skip_select: warmup must be >= 0");
    const int T = residuals.length();
    const int d = residuals.dim();
    const int n = T - warmup;
    if (n <= d) throw dimension_error("huber_skip_select: window too short");

    // Sample covariance over the scoring window (warmup, T].
    Vector mean = Vector::Zero(d);
    for (int t = warmup; t < T; ++t) mean += residuals.values.row(t).transpose();
    mean /= n;
    Matrix cov = Matrix::Zero(d, d);
    for (int t = warmup; t < T; ++t) {
        const Vector dev = residuals.values.row(t).transpose() - mean;
        cov += dev * dev.transpose();
    }
    cov /= n;

    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success)
        throw degenerate_error("huber_skip_select: singular residual covariance");

    // Squared Mahalanobis norms e_t' S^{-1} e_t; ties go to the smaller index.
    std::vector<std::pair<double, int>> scored;
    scored.reserve(static_cast<std::size_t>(n));
    for (int t = warmup; t < T; ++t) {
        const Vector e = residuals.values.row(t).transpose();
        const double norm = e.dot(llt.solve(e));
        if (!std::isfinite(norm))
            throw degenerate_error("huber_skip_select: non-finite residual norm");
        scored.emplace_back(norm, t + 1);
    }
    std::sort(scored.begin(), scored.end());

    const int keep = static_cast<int>(std::ceil((1.0 - alpha) * n));
    IndexSet out;
    out.T = T;
    out.members.reserve(static_cast<std::size_t>(keep));
    for (int i = 0; i < keep; ++i) out.members.push_back(scored[i].second);
    std::sort(out.members.begin(), out.members.end());
    return out;
}

IndexSet oracle_select(const std::vector<std::uint8_t>& delta) {
    IndexSet out;
    out.T = static_cast<int>(delta.size());
    for (int t = 1; t <= out.T; ++t)
        if (!delta[t - 1]) out.members.push_back(t);
    return out;
}

}  // namespace varma
