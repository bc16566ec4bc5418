#pragma once

#include <cstdint>
#include <vector>

#include "varma/model.hpp"

namespace varma {

// Patch removal operator S^kappa: removes, for every excluded index t, the
// forward block {t+1, .., min(t+kappa, T)}. The complement is taken within
// the ambient range {1, .., T}.
IndexSet patch_remove(const IndexSet& H, int kappa);

// Same transform with the complement taken within {lo, .., T} only. Used by
// the iterative procedure, where indices below the warmup are unused for
// scoring rather than rejected, so they spawn no patches.
IndexSet patch_remove_within(const IndexSet& H, int kappa, int lo);

// Hard-trimming subset selection: computes squared Mahalanobis norms
// e_t' S^{-1} e_t with S the sample covariance of the residuals over
// t in (warmup, T], and retains the ceil((1-alpha)(T-warmup)) indices with
// the smallest norms; ties broken by smaller index.
// Throws degenerate_error when the covariance is singular.
IndexSet huber_skip_select(const ResidualSeries& residuals, double alpha, int warmup);

// Oracle subset {t : delta_t = 0}.
IndexSet oracle_select(const std::vector<std::uint8_t>& delta);

}  // namespace varma
