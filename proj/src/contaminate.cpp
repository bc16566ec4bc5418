#include "varma/contaminate.hpp"

#include <cmath>

#include "varma/lagpoly.hpp"
#include "varma/rng.hpp"

namespace varma {

std::vector<std::uint8_t> make_indicator(int T, double alpha, std::uint64_t seed, int guard) {
    if (T < 1) throw dimension_error("make_indicator: T must be >= 1");
    if (alpha < 0 || alpha >= 0.5)
        throw dimension_error("make_indicator: alpha must be in [0, 0.5)");
    if (guard < 0) throw dimension_error("make_indicator: guard must be >= 0");

    const int count = static_cast<int>(std::lround(alpha * T));
    const int slots = T - guard;
    if (count > slots)
        throw dimension_error("make_indicator: round(alpha T) exceeds available slots");

    std::vector<std::uint8_t> delta(static_cast<std::size_t>(T), 0);
    if (count == 0) return delta;

    // Partial Fisher-Yates over the eligible indices {guard+1, .., T}.
    std::vector<int> pool(static_cast<std::size_t>(slots));
    for (int i = 0; i < slots; ++i) pool[i] = guard + 1 + i;
    SplitMix64 rng(seed);
    for (int i = 0; i < count; ++i) {
        const int j = i + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(slots - i)));
        std::swap(pool[i], pool[j]);
        delta[pool[i] - 1] = 1;
    }
    return delta;
}

ContaminationSpec constant_magnitude_spec(OutlierKind kind, const std::vector<std::uint8_t>& delta,
                                          double zeta, int d) {
    ContaminationSpec spec;
    spec.kind = kind;
    spec.delta = delta;
    spec.zeta = Matrix::Zero(static_cast<int>(delta.size()), d);
    for (std::size_t t = 0; t < delta.size(); ++t)
        if (delta[t]) spec.zeta.row(static_cast<int>(t)).setConstant(zeta);
    spec.validate();
    return spec;
}

TimeSeries apply_ao(const TimeSeries& series, const ContaminationSpec& spec) {
    if (spec.kind != OutlierKind::AO) throw dimension_error("apply_ao: spec kind is not AO");
    if (spec.length() != series.length() || spec.zeta.cols() != series.dim())
        throw dimension_error("apply_ao: spec does not match series shape");

    TimeSeries out = series;
    out.origin = SeriesOrigin::Contaminated;
    for (int t = 0; t < series.length(); ++t)
        if (spec.delta[t]) out.values.row(t) += spec.zeta.row(t);
    return out;
}

TimeSeries apply_io(const TimeSeries& series, const ContaminationSpec& spec,
                    const VarmaModel& true_model) {
    if (spec.kind != OutlierKind::IO) throw dimension_error("apply_io: spec kind is not IO");
    if (spec.length() != series.length() || spec.zeta.cols() != series.dim())
        throw dimension_error("apply_io: spec does not match series shape");
    const CausalityReport report = check_causal_invertible(true_model);
    if (!report.causal) throw model_error("apply_io: true model is not causal");

    const int T = series.length();
    const int d = series.dim();

    // Level wave w = phi0^{-1}(L) delta zeta via the AR recursion, zero presample.
    Matrix w = Matrix::Zero(T, d);
    for (int t = 0; t < T; ++t) {
        Vector wt = spec.delta[t] ? Vector(spec.zeta.row(t).transpose()) : Vector(Vector::Zero(d));
        for (int i = 1; i <= true_model.p; ++i)
            if (t - i >= 0) wt += true_model.phi[i - 1] * w.row(t - i).transpose();
        w.row(t) = wt.transpose();
    }

    TimeSeries out = series;
    out.origin = SeriesOrigin::Contaminated;
    for (int t = 0; t < T; ++t)
        if (w.row(t).cwiseAbs().maxCoeff() != 0.0) out.values.row(t) += w.row(t);
    return out;
}

TimeSeries residual_footprint(const ContaminationSpec& spec, const VarmaModel& candidate,
                              const VarmaModel& true_model, int K) {
    const int T = spec.length();
    const int d = static_cast<int>(spec.zeta.cols());
    if (candidate.d != d) throw dimension_error("residual_footprint: dimension mismatch");

    // Contamination wave in the observed series: delta zeta for AO,
    // phi0^{-1}(L) delta zeta for IO.
    Matrix wave = Matrix::Zero(T, d);
    if (spec.kind == OutlierKind::AO) {
        for (int t = 0; t < T; ++t)
            if (spec.delta[t]) wave.row(t) = spec.zeta.row(t);
    } else {
        const CausalityReport report = check_causal_invertible(true_model);
        if (!report.causal) throw model_error("residual_footprint: true model is not causal");
        for (int t = 0; t < T; ++t) {
            Vector wt =
                spec.delta[t] ? Vector(spec.zeta.row(t).transpose()) : Vector(Vector::Zero(d));
            for (int i = 1; i <= true_model.p; ++i)
                if (t - i >= 0) wt += true_model.phi[i - 1] * wave.row(t - i).transpose();
            wave.row(t) = wt.transpose();
        }
    }

    // Push the wave through pi_cand(L) by explicit convolution with the
    // expanded series (throws model_error for a non-invertible candidate).
    const PowerSeries pi = expand_pi(candidate, K);
    TimeSeries footprint;
    footprint.origin = SeriesOrigin::Contaminated;
    footprint.values = Matrix::Zero(T, d);
    for (int t = 0; t < T; ++t) {
        Vector ft = Vector::Zero(d);
        for (int k = 0; k <= std::min(K, t); ++k)
            ft += pi.at(k) * wave.row(t - k).transpose();
        footprint.values.row(t) = ft.transpose();
    }
    return footprint;
}

}  // namespace varma
