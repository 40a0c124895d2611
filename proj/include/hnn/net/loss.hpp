#pragma once

#include "hnn/common.hpp"

#include <cmath>

namespace hnn::net {

// Floor applied to variances inside the loss only; emitted paths are never
// floored, so reported variances stay unbiased.
constexpr double kLossVarianceFloor = 1e-8;

struct NllLoss {
    double loss = 0.0;  // sum over observations of (y-mu)^2/var + log(var)
    Vector d_mean;
    Vector d_variance;
    int floored = 0;
};

inline NllLoss gaussian_nll_loss(const Vector& y, const Vector& mean, const Vector& variance) {
    const Eigen::Index n = y.size();
    if (mean.size() != n || variance.size() != n)
        throw ShapeError("gaussian_nll_loss: length mismatch");
    NllLoss r;
    r.d_mean = Vector::Zero(n);
    r.d_variance = Vector::Zero(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        if (!(variance[t] > 0.0)) throw DomainError("gaussian_nll_loss: nonpositive variance");
        double v = variance[t];
        bool at_floor = false;
        if (v < kLossVarianceFloor) {
            v = kLossVarianceFloor;
            at_floor = true;
            ++r.floored;
        }
        const double e = y[t] - mean[t];
        r.loss += e * e / v + std::log(v);
        r.d_mean[t] = -2.0 * e / v;
        r.d_variance[t] = at_floor ? 0.0 : (1.0 / v - e * e / (v * v));
    }
    return r;
}

struct MseLoss {
    double loss = 0.0;  // sum of squared errors
    Vector d_mean;
};

inline MseLoss squared_error_loss(const Vector& y, const Vector& mean) {
    if (mean.size() != y.size()) throw ShapeError("squared_error_loss: length mismatch");
    MseLoss r;
    const Vector e = y - mean;
    r.loss = e.squaredNorm();
    r.d_mean = -2.0 * e;
    return r;
}

}  // namespace hnn::net
