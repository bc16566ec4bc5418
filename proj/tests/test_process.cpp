#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "varma/lagpoly.hpp"
#include "varma/process.hpp"

using namespace varma;

namespace {

TimeSeries scalar_series(std::initializer_list<double> values) {
    TimeSeries s;
    s.values.resize(static_cast<int>(values.size()), 1);
    int t = 0;
    for (double v : values) s.values(t++, 0) = v;
    return s;
}

}  // namespace

TEST_CASE("simulate basics") {
    SUBCASE("zero innovation covariance gives an identically zero path") {
        const VarmaModel m(2, {testutil::design_a()}, {}, Matrix::Zero(2, 2));
        const SimulationResult sim = simulate(m, 50, 100, 1);
        CHECK(sim.series.values.cwiseAbs().maxCoeff() == 0.0);
        CHECK(sim.innovations.values.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("determinism: same seed bit-identical, different seed different") {
        const VarmaModel m(2, {testutil::design_a()}, {}, testutil::design_sigma());
        const SimulationResult a = simulate(m, 200, 100, 42);
        const SimulationResult b = simulate(m, 200, 100, 42);
        const SimulationResult c = simulate(m, 200, 100, 43);
        CHECK((a.series.values - b.series.values).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a.series.values - c.series.values).cwiseAbs().maxCoeff() > 0.0);
    }
    SUBCASE("non-causal model rejected") {
        CHECK_THROWS_AS(simulate(scalar_ar1(1.01), 10, 0, 1), model_error);
    }
    SUBCASE("indefinite sigma rejected") {
        Matrix sigma(2, 2);
        sigma << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
        const VarmaModel m(2, {Matrix::Zero(2, 2)}, {}, sigma);
        CHECK_THROWS_AS(simulate(m, 10, 0, 1), model_error);
    }
}

TEST_CASE("simulate long-run moments against closed forms") {
    SUBCASE("scalar AR(1) stationary variance") {
        const int T = 100000;
        const SimulationResult sim = simulate(scalar_ar1(0.7), T, 500, 2024);
        const double var = sim.series.values.col(0).squaredNorm() / T;
        CHECK(var == doctest::Approx(1.0 / (1.0 - 0.49)).epsilon(0.02));
    }
    SUBCASE("bivariate VAR(1) Yule-Walker: Gamma(1) = A Gamma(0)") {
        const VarmaModel m(2, {testutil::design_a()}, {}, testutil::design_sigma());
        const int T = 100000;
        const SimulationResult sim = simulate(m, T, 500, 515);
        const Matrix& x = sim.series.values;
        Matrix g0 = Matrix::Zero(2, 2), g1 = Matrix::Zero(2, 2);
        for (int t = 0; t < T; ++t) g0 += x.row(t).transpose() * x.row(t);
        g0 /= T;
        for (int t = 1; t < T; ++t) g1 += x.row(t).transpose() * x.row(t - 1);
        g1 /= (T - 1);
        const Matrix predicted = testutil::design_a() * g0;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                CHECK(g1(r, c) == doctest::Approx(predicted(r, c)).epsilon(0.02));
    }
}

TEST_CASE("residual filter examples") {
    SUBCASE("all-zero series gives all-zero residuals") {
        const ResidualSeries e = residuals(scalar_series({0, 0, 0, 0}), scalar_arma11(0.3, 0.4));
        CHECK(e.values.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("scalar AR(1) hand recursion") {
        const ResidualSeries e = residuals(scalar_series({1, 1, 1}), scalar_ar1(0.5));
        CHECK(e.values(0, 0) == doctest::Approx(1.0));
        CHECK(e.values(1, 0) == doctest::Approx(0.5));
        CHECK(e.values(2, 0) == doctest::Approx(0.5));
    }
    SUBCASE("scalar MA(1) hand recursion") {
        const ResidualSeries e = residuals(scalar_series({1, 0, 0}), scalar_ma1(0.5));
        CHECK(e.values(0, 0) == doctest::Approx(1.0));
        CHECK(e.values(1, 0) == doctest::Approx(-0.5));
        CHECK(e.values(2, 0) == doctest::Approx(0.25));
    }
    SUBCASE("dimension mismatch rejected") {
        const VarmaModel m(2, {testutil::design_a()}, {}, testutil::design_sigma());
        CHECK_THROWS_AS(residuals(scalar_series({1, 2, 3}), m), dimension_error);
    }
}

TEST_CASE("round trip: filtering a simulated path at truth recovers the innovations") {
    const VarmaModel models[] = {
        VarmaModel(2, {testutil::design_a()}, {}, testutil::design_sigma()),
        VarmaModel(2, {}, {testutil::design_a()}, testutil::design_sigma()),
        VarmaModel(2, {testutil::design_a()}, {testutil::design_a()}, testutil::design_sigma()),
    };
    for (const VarmaModel& m : models) {
        const int T = 600;
        const SimulationResult sim = simulate(m, T, 500, 909);
        const ResidualSeries e = residuals(sim.series, m);
        // The refit starts from zero presample inside the kept window, so the
        // first residuals carry a transient that dies off geometrically.
        double max_diff = 0.0;
        for (int t = 120; t < T; ++t)
            max_diff = std::max(max_diff,
                                (e.values.row(t) - sim.innovations.values.row(t)).cwiseAbs().maxCoeff());
        CHECK(max_diff <= 1e-8);
    }
}

TEST_CASE("residual filter is linear in the series") {
    varma::SplitMix64 rng(5150);
    const VarmaModel m = testutil::random_stable_model(rng, 2, 1, 1);
    const int T = 80;
    TimeSeries x, y;
    x.values.resize(T, 2);
    y.values.resize(T, 2);
    for (int t = 0; t < T; ++t)
        for (int j = 0; j < 2; ++j) {
            x.values(t, j) = rng.uniform01() - 0.5;
            y.values(t, j) = rng.uniform01() - 0.5;
        }
    const double a = 1.7, b = -0.4;
    TimeSeries combo;
    combo.values = a * x.values + b * y.values;
    const Matrix lhs = residuals(combo, m).values;
    const Matrix rhs = a * residuals(x, m).values + b * residuals(y, m).values;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("residual filter agrees with truncated pi convolution") {
    varma::SplitMix64 rng(61);
    const VarmaModel m = scalar_arma11(0.6, 0.5);
    const int T = 200, K = 30;
    TimeSeries s;
    s.values.resize(T, 1);
    for (int t = 0; t < T; ++t) s.values(t, 0) = 2.0 * (rng.uniform01() - 0.5);

    const PowerSeries pi = expand_pi(m, K);
    const DecayBound bound = fit_decay_bound(expand_pi(m, 60));
    Matrix conv = Matrix::Zero(T, 1);
    for (int t = 0; t < T; ++t)
        for (int k = 0; k <= std::min(K, t); ++k)
            conv(t, 0) += pi.at(k)(0, 0) * s.values(t - k, 0);

    const Matrix direct = residuals(s, m).values;
    const double tolerance =
        bound.M * std::pow(bound.R, K) * s.values.cwiseAbs().maxCoeff() + 1e-12;
    CHECK((direct - conv).cwiseAbs().maxCoeff() <= tolerance);
}
