#pragma once

#include "hnn/rng.hpp"
#include "hnn/stats.hpp"

namespace hnn::model {

// Reality-check parameters: log(eps^2_t) = zeta0 + zeta1 * log(h_v,t) + xi_t,
// recalibrated variance = exp(zeta0 + zeta1 * log(h_v,t)) * varsigma with
// varsigma = E[exp(xi)] estimated by resampling the fitted xi.
struct RecalParams {
    double zeta0 = 0.0;
    double zeta1 = 1.0;
    double varsigma = 1.0;
    Vector xi_residuals;
    int floored_count = 0;     // squared residuals floored at 1e-12 before the log
    bool intercept_only = false;
};

inline RecalParams recalibrate(const Vector& oob_sq_residuals, const Vector& oob_var_path,
                               std::uint64_t rng_seed, long n_draws = 100000) {
    const Eigen::Index n = oob_sq_residuals.size();
    if (oob_var_path.size() != n) throw ShapeError("recalibrate: length mismatch");
    if (n < 1) throw DomainError("recalibrate: empty inputs");
    RecalParams p;
    Vector log_e2(n), log_hv(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        if (!(oob_var_path[t] > 0.0)) throw DomainError("recalibrate: nonpositive variance path");
        double e2 = oob_sq_residuals[t];
        if (e2 < 1e-12) {
            e2 = 1e-12;
            ++p.floored_count;
        }
        log_e2[t] = std::log(e2);
        log_hv[t] = std::log(oob_var_path[t]);
    }
    // zeta1 is unidentified when h_v is (numerically) constant or the sample
    // is tiny; fall back to the intercept-only regression.
    if (n < 3 || variance_of(log_hv) < 1e-12) {
        p.intercept_only = true;
        p.zeta1 = 0.0;
        p.zeta0 = log_e2.mean();
    } else {
        auto [b0, b1] = ols_simple(log_hv, log_e2);
        p.zeta0 = b0;
        p.zeta1 = b1;
    }
    p.xi_residuals = log_e2 - (p.zeta1 * log_hv).array().matrix() -
                     Vector::Constant(n, p.zeta0);
    Rng rng(rng_seed);
    double acc = 0.0;
    for (long d = 0; d < n_draws; ++d)
        acc += std::exp(p.xi_residuals[rng.uniform_int(0, n - 1)]);
    p.varsigma = acc / static_cast<double>(n_draws);
    return p;
}

inline Vector recalibrated_path(const RecalParams& p, const Vector& var_path) {
    Vector out(var_path.size());
    for (Eigen::Index t = 0; t < var_path.size(); ++t) {
        if (!(var_path[t] > 0.0)) throw DomainError("recalibrated_path: nonpositive variance");
        out[t] = std::exp(p.zeta0 + p.zeta1 * std::log(var_path[t])) * p.varsigma;
    }
    return out;
}

}  // namespace hnn::model
