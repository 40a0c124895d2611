#include "hnn/baselines/ar.hpp"

#include <cmath>

namespace hnn::baselines {

namespace {

ArModel fit_ar2_impl(const Vector& y, int horizon) {
    const Eigen::Index T = y.size();
    const Eigen::Index n = T - 2 - (horizon - 1);
    if (n < 8) throw DomainError("fit_ar2: sample too short");
    Matrix X(n, 3);
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index t = i + 1;  // lag-1 index
        X(i, 0) = 1.0;
        X(i, 1) = y[t];
        X(i, 2) = y[t - 1];
        z[i] = y[t + horizon];
    }
    const Matrix G = X.transpose() * X;
    Eigen::FullPivLU<Matrix> lu(G);
    if (!lu.isInvertible()) throw DomainError("fit_ar2: singular design (constant series?)");
    const Vector b = lu.solve(X.transpose() * z);
    ArModel m;
    m.intercept = b[0];
    m.phi1 = b[1];
    m.phi2 = b[2];
    m.horizon = horizon;
    const Vector resid = z - X * b;
    m.residual_variance = resid.squaredNorm() / static_cast<double>(n - 3);
    m.eta = std::sqrt(resid.squaredNorm() / static_cast<double>(n));
    // AR(2) stationarity triangle
    m.nonstationary =
        !(std::abs(m.phi2) < 1.0 && m.phi1 + m.phi2 < 1.0 && m.phi2 - m.phi1 < 1.0);
    return m;
}

}  // namespace

ArModel fit_ar2(const Vector& y) { return fit_ar2_impl(y, 1); }

ArModel fit_ar2_direct(const Vector& y, int horizon) {
    if (horizon < 1) throw ConfigError("fit_ar2_direct: horizon must be >= 1");
    return fit_ar2_impl(y, horizon);
}

}  // namespace hnn::baselines
