#pragma once

#include "hnn/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace hnn {

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Acklam's rational approximation for the standard normal quantile,
// refined with one Halley step (absolute error well below 1e-12).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must be in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

inline double mean_of(const Vector& v) { return v.mean(); }

inline double variance_of(const Vector& v) {
    if (v.size() < 2) return 0.0;
    const double m = v.mean();
    return (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
}

inline double sd_of(const Vector& v) { return std::sqrt(variance_of(v)); }

// OLS of y on [1, x]; returns {intercept, slope}.
inline std::pair<double, double> ols_simple(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw ShapeError("ols_simple: length mismatch");
    const double mx = x.mean();
    const double my = y.mean();
    const double sxx = (x.array() - mx).square().sum();
    const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
    const double slope = sxy / sxx;
    return {my - slope * mx, slope};
}

// Asymptotic Kolmogorov distribution with Stephens' small-sample correction;
// p-value of the one-sample KS test of `u` against Uniform(0,1).
inline double ks_uniform_pvalue(std::vector<double> u) {
    const auto n = static_cast<double>(u.size());
    if (u.empty()) throw DomainError("ks_uniform_pvalue: empty sample");
    std::sort(u.begin(), u.end());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double cdf = std::clamp(u[i], 0.0, 1.0);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, cdf - lo, hi - cdf});
    }
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        p += sign * term;
        sign = -sign;
        if (term < 1e-12) break;
    }
    return std::clamp(2.0 * p, 0.0, 1.0);
}

inline std::vector<double> rank_of(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

inline double spearman_corr(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) throw ShapeError("spearman_corr: bad inputs");
    const auto ra = rank_of(a);
    const auto rb = rank_of(b);
    const auto n = static_cast<Eigen::Index>(a.size());
    Vector x(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x[i] = ra[static_cast<std::size_t>(i)];
        y[i] = rb[static_cast<std::size_t>(i)];
    }
    const double mx = x.mean(), my = y.mean();
    const double num = ((x.array() - mx) * (y.array() - my)).sum();
    const double den = std::sqrt((x.array() - mx).square().sum() * (y.array() - my).square().sum());
    return num / den;
}

}  // namespace hnn
