#pragma once

#include "hnn/common.hpp"

namespace hnn::baselines {

// OLS AR(2): y_t on (1, y_{t-1}, y_{t-2}). Stationarity is estimated freely
// and only flagged.
struct ArModel {
    double intercept = 0.0;
    double phi1 = 0.0;
    double phi2 = 0.0;
    double residual_variance = 1.0;  // df-corrected
    double eta = 1.0;                // sd of in-sample residuals
    bool nonstationary = false;
    int horizon = 1;
};

ArModel fit_ar2(const Vector& y);

// Direct s-step projection: y_{t+s} on (1, y_t, y_{t-1}).
ArModel fit_ar2_direct(const Vector& y, int horizon);

// Conditional mean given the two most recent observations.
inline double ar2_mean(const ArModel& m, double y_last, double y_prev) {
    return m.intercept + m.phi1 * y_last + m.phi2 * y_prev;
}

}  // namespace hnn::baselines
