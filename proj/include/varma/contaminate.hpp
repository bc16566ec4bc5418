#pragma once

#include <cstdint>
#include <vector>

#include "varma/model.hpp"

namespace varma {

// Draws exactly round(alpha * T) outlier positions uniformly without
// replacement from {guard+1, .., T}. Deterministic per seed.
std::vector<std::uint8_t> make_indicator(int T, double alpha, std::uint64_t seed, int guard = 0);

// Constant-magnitude spec: zeta row = (zeta, .., zeta) at every flagged index.
ContaminationSpec constant_magnitude_spec(OutlierKind kind, const std::vector<std::uint8_t>& delta,
                                          double zeta, int d);

// Additive outliers: y_t = x_t + delta_t zeta_t.
TimeSeries apply_ao(const TimeSeries& series, const ContaminationSpec& spec);

// Innovative outliers: y_t = x_t + w_t with w_t = sum_i Phi0_i w_{t-i} + delta_t zeta_t
// (zero presample). Reduces exactly to apply_ao when the true model has p = 0.
TimeSeries apply_io(const TimeSeries& series, const ContaminationSpec& spec,
                    const VarmaModel& true_model);

// Exact residual footprint of the contamination at a candidate parameter:
// pi_cand(L) delta zeta for AO, pi_cand(L) phi0^{-1}(L) delta zeta for IO,
// with each event truncated at K lags. Computed by convolving the expanded
// pi series with the contamination wave, independently of the recursive
// residual filter.
TimeSeries residual_footprint(const ContaminationSpec& spec, const VarmaModel& candidate,
                              const VarmaModel& true_model, int K);

}  // namespace varma
