#pragma once

#include <cstdint>

#include "varma/model.hpp"

namespace varma {

struct SimulationResult {
    TimeSeries series;       // T x d observations
    TimeSeries innovations;  // the eps_t that generated them
};

// Simulates a causal VARMA path with Gaussian innovations N_d(0, sigma).
// The recursion starts from zero presample, runs burn_in + T steps and keeps
// the last T. Identical (seed, model, T, burn_in) give bit-identical output.
// Throws model_error for a non-causal model or an indefinite sigma.
SimulationResult simulate(const VarmaModel& model, int T, int burn_in, std::uint64_t seed);

// Conditional residual filter
//   e_t = x_t - sum_i Phi_i x_{t-i} - sum_j Theta_j e_{t-j}
// with zero presample for both x and e. Linear in the input series.
ResidualSeries residuals(const TimeSeries& series, const VarmaModel& params);

// Same filter applied to a centered copy of the series (x_t - center).
ResidualSeries residuals_centered(const TimeSeries& series, const VarmaModel& params,
                                  const Vector& center);

}  // namespace varma
