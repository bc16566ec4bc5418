#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "varma/errors.hpp"

namespace varma {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// VARMA(p,q) parameter set for a d-dimensional process. Sign convention,
// shared by every module: the AR operator is I - sum_i Phi_i L^i and the MA
// operator is I + sum_j Theta_j L^j, i.e.
//   x_t = sum_i Phi_i x_{t-i} + eps_t + sum_j Theta_j eps_{t-j}.
struct VarmaModel {
    int d = 0;
    int p = 0;
    int q = 0;
    std::vector<Matrix> phi;    // p matrices, each d x d
    std::vector<Matrix> theta;  // q matrices, each d x d
    Matrix sigma;               // d x d innovation covariance

    VarmaModel() = default;
    VarmaModel(int d_, std::vector<Matrix> phi_, std::vector<Matrix> theta_, Matrix sigma_)
        : d(d_),
          p(static_cast<int>(phi_.size())),
          q(static_cast<int>(theta_.size())),
          phi(std::move(phi_)),
          theta(std::move(theta_)),
          sigma(std::move(sigma_)) {
        validate();
    }

    void validate() const {
        if (d <= 0) throw dimension_error("VarmaModel: dimension must be positive");
        if (static_cast<int>(phi.size()) != p || static_cast<int>(theta.size()) != q)
            throw dimension_error("VarmaModel: coefficient counts do not match orders");
        for (const Matrix& m : phi)
            if (m.rows() != d || m.cols() != d)
                throw dimension_error("VarmaModel: AR coefficient is not d x d");
        for (const Matrix& m : theta)
            if (m.rows() != d || m.cols() != d)
                throw dimension_error("VarmaModel: MA coefficient is not d x d");
        if (sigma.rows() != d || sigma.cols() != d)
            throw dimension_error("VarmaModel: sigma is not d x d");
        if (!phi_theta_finite())
            throw dimension_error("VarmaModel: non-finite coefficient entry");
    }

    // Number of dynamic parameters (Phi and Theta entries; Sigma excluded).
    int dynamic_param_count() const { return d * d * (p + q); }

    // Vectorized dynamic parameters: vec(Phi_1..Phi_p) then vec(Theta_1..Theta_q),
    // column-major within each matrix.
    Vector dynamic_params() const {
        Vector v(dynamic_param_count());
        int k = 0;
        for (const Matrix& m : phi)
            for (int c = 0; c < d; ++c)
                for (int r = 0; r < d; ++r) v[k++] = m(r, c);
        for (const Matrix& m : theta)
            for (int c = 0; c < d; ++c)
                for (int r = 0; r < d; ++r) v[k++] = m(r, c);
        return v;
    }

    // Inverse of dynamic_params(); d, p, q and sigma are kept.
    static VarmaModel from_dynamic_params(int d, int p, int q, const Vector& v,
                                          const Matrix& sigma) {
        if (v.size() != static_cast<Eigen::Index>(d) * d * (p + q))
            throw dimension_error("from_dynamic_params: wrong vector length");
        VarmaModel m;
        m.d = d;
        m.p = p;
        m.q = q;
        m.sigma = sigma;
        int k = 0;
        auto take = [&]() {
            Matrix a(d, d);
            for (int c = 0; c < d; ++c)
                for (int r = 0; r < d; ++r) a(r, c) = v[k++];
            return a;
        };
        for (int i = 0; i < p; ++i) m.phi.push_back(take());
        for (int j = 0; j < q; ++j) m.theta.push_back(take());
        return m;
    }

  private:
    bool phi_theta_finite() const {
        for (const Matrix& m : phi)
            if (!m.allFinite()) return false;
        for (const Matrix& m : theta)
            if (!m.allFinite()) return false;
        return true;
    }
};

// Convenience constructors for scalar (d = 1) models used all over the tests.
inline VarmaModel scalar_ar1(double phi, double sigma2 = 1.0) {
    return VarmaModel(1, {Matrix::Constant(1, 1, phi)}, {}, Matrix::Constant(1, 1, sigma2));
}
inline VarmaModel scalar_ma1(double theta, double sigma2 = 1.0) {
    return VarmaModel(1, {}, {Matrix::Constant(1, 1, theta)}, Matrix::Constant(1, 1, sigma2));
}
inline VarmaModel scalar_arma11(double phi, double theta, double sigma2 = 1.0) {
    return VarmaModel(1, {Matrix::Constant(1, 1, phi)}, {Matrix::Constant(1, 1, theta)},
                      Matrix::Constant(1, 1, sigma2));
}

enum class SeriesOrigin { Clean, Contaminated, Empirical };

// T x d block of observations; time index runs 1..T (row t-1 stores time t).
struct TimeSeries {
    Matrix values;  // T x d
    SeriesOrigin origin = SeriesOrigin::Clean;

    int length() const { return static_cast<int>(values.rows()); }
    int dim() const { return static_cast<int>(values.cols()); }

    void validate() const {
        if (values.rows() < 1) throw dimension_error("TimeSeries: T must be >= 1");
        if (!values.allFinite()) throw dimension_error("TimeSeries: non-finite entry");
    }
};

enum class Presample { Zero };  // conditional residuals: x_t = e_t = 0 for t <= 0

// Residuals e_t(params) from filtering a series through candidate dynamics.
struct ResidualSeries {
    Matrix values;  // T x d
    VarmaModel params;
    Presample presample = Presample::Zero;

    int length() const { return static_cast<int>(values.rows()); }
    int dim() const { return static_cast<int>(values.cols()); }
};

enum class OutlierKind { AO, IO };

// Outlier locations (delta) and magnitudes (zeta). zeta rows must be zero
// wherever delta is zero; the contamination fraction must stay below 1/2.
struct ContaminationSpec {
    OutlierKind kind = OutlierKind::AO;
    std::vector<std::uint8_t> delta;  // length T, entries 0/1
    Matrix zeta;                      // T x d

    int length() const { return static_cast<int>(delta.size()); }

    void validate() const {
        const int T = length();
        if (T < 1) throw dimension_error("ContaminationSpec: empty indicator");
        if (zeta.rows() != T) throw dimension_error("ContaminationSpec: zeta length mismatch");
        long count = 0;
        for (int t = 0; t < T; ++t) {
            if (delta[t] != 0 && delta[t] != 1)
                throw dimension_error("ContaminationSpec: delta entries must be 0/1");
            if (delta[t] == 0 && zeta.row(t).cwiseAbs().maxCoeff() != 0.0)
                throw dimension_error("ContaminationSpec: zeta nonzero where delta = 0");
            count += delta[t];
        }
        if (2 * count >= T)
            throw dimension_error("ContaminationSpec: contamination fraction must be < 1/2");
    }
};

// Sorted set of retained time indices within {1,..,T}.
struct IndexSet {
    int T = 0;
    std::vector<int> members;  // strictly increasing, values in [1, T]

    int size() const { return static_cast<int>(members.size()); }
    bool contains(int t) const {
        return std::binary_search(members.begin(), members.end(), t);
    }

    static IndexSet full(int T) {
        IndexSet h;
        h.T = T;
        h.members.resize(T);
        for (int t = 1; t <= T; ++t) h.members[t - 1] = t;
        return h;
    }

    void validate() const {
        int prev = 0;
        for (int t : members) {
            if (t <= prev || t > T)
                throw dimension_error("IndexSet: members must be strictly increasing in [1,T]");
            prev = t;
        }
    }

    bool operator==(const IndexSet& other) const {
        return T == other.T && members == other.members;
    }
};

}  // namespace varma
