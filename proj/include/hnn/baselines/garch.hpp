#pragma once

#include "hnn/common.hpp"

namespace hnn::baselines {

// Gaussian GARCH(1,1): sigma2_t = omega + alpha * eps2_{t-1} + beta * sigma2_{t-1},
// sigma2_0 = sample variance of the residuals. Covariance stationarity
// (alpha + beta < 1) is enforced by the optimizer's parameter transform.
struct GarchModel {
    double omega = 0.1;
    double alpha = 0.1;
    double beta = 0.8;
    double initial_variance = 1.0;
    double loglik = 0.0;  // full Gaussian log-likelihood
    Vector filtered;      // sigma2_t over the estimation sample
};

// Filtered conditional variances for a residual series under the model.
Vector garch_filter(const GarchModel& m, const Vector& residuals);

// Negative log-likelihood (up to the 2*pi constant) used by the optimizer;
// exposed for tests.
double garch_nll(double omega, double alpha, double beta, const Vector& residuals);

GarchModel fit_garch11(const Vector& residuals);

inline double garch_next_variance(const GarchModel& m, double last_eps, double last_var) {
    return m.omega + m.alpha * last_eps * last_eps + m.beta * last_var;
}

// k-step-ahead variance forecast from the recursion's conditional expectation.
inline double garch_forecast_variance(const GarchModel& m, double next_var, int extra_steps) {
    double v = next_var;
    for (int k = 0; k < extra_steps; ++k) v = m.omega + (m.alpha + m.beta) * v;
    return v;
}

}  // namespace hnn::baselines
