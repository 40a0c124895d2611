#include "hnn/data/design.hpp"

#include <cmath>

namespace hnn::data {

const std::vector<int>& DesignMatrix::group(const std::string& name) const {
    for (const auto& [n, cols] : column_groups)
        if (n == name) return cols;
    throw DataError("design has no column group '" + name + "'");
}

DesignMatrix build_design(const TimeSeriesPanel& panel, const std::string& target, int horizon,
                          int n_lags, int n_trends, Eigen::Index fit_rows) {
    panel.validate();
    if (panel.has_missing())
        throw DomainError("build_design: panel has missing values; impute first");
    if (n_lags < 1) throw ConfigError("build_design: n_lags must be >= 1");
    if (horizon < 0) throw ConfigError("build_design: horizon must be >= 0");
    const int target_col = panel.column(target);

    const Eigen::Index T = panel.rows();
    const Eigen::Index R = T - (n_lags - 1);  // forecast origins
    const Eigen::Index n_labeled = R - horizon;
    if (n_labeled <= 0) throw DomainError("build_design: sample too short for lags + horizon");

    const Eigen::Index N = panel.n_series();
    const Eigen::Index K = N * n_lags + n_trends;

    DesignMatrix d;
    d.horizon = horizon;
    d.n_lags = n_lags;
    d.n_trends = n_trends;
    d.n_labeled = n_labeled;
    d.X.resize(R, K);
    d.y = Vector::Constant(R, std::nan(""));
    d.trend_denom = static_cast<double>(R);

    for (Eigen::Index j = 0; j < N; ++j) {
        std::vector<int> cols;
        for (int l = 0; l < n_lags; ++l) {
            const auto col = static_cast<Eigen::Index>(j * n_lags + l);
            d.column_names.push_back(panel.names[static_cast<std::size_t>(j)] +
                                     (l == 0 ? "" : "_lag" + std::to_string(l)));
            cols.push_back(static_cast<int>(col));
            for (Eigen::Index r = 0; r < R; ++r)
                d.X(r, col) = panel.values(r + n_lags - 1 - l, j);
        }
        d.column_groups.emplace_back(panel.names[static_cast<std::size_t>(j)], std::move(cols));
    }

    // staggered-origin hockey-stick trends: trend_j(r) = max(0, r - tau_j) / R
    if (n_trends > 0) {
        std::vector<int> trend_cols;
        for (int q = 0; q < n_trends; ++q) {
            const double tau = static_cast<double>(q) * d.trend_denom /
                               static_cast<double>(n_trends);
            d.trend_kinks.push_back(tau);
            const auto col = N * n_lags + q;
            d.column_names.push_back("trend" + std::to_string(q));
            trend_cols.push_back(static_cast<int>(col));
            for (Eigen::Index r = 0; r < R; ++r)
                d.X(r, col) = std::max(0.0, static_cast<double>(r) - tau) / d.trend_denom;
        }
        d.column_groups.emplace_back("trend", std::move(trend_cols));
    }

    for (Eigen::Index r = 0; r < n_labeled; ++r)
        d.y[r] = panel.values(r + n_lags - 1 + horizon, target_col);

    for (Eigen::Index r = 0; r < R; ++r) {
        d.origin_dates.push_back(panel.dates[static_cast<std::size_t>(r + n_lags - 1)]);
        if (r < n_labeled)
            d.target_dates.push_back(
                panel.dates[static_cast<std::size_t>(r + n_lags - 1 + horizon)]);
    }

    d.fit_rows = fit_rows < 0 ? n_labeled : fit_rows;
    if (d.fit_rows < 2 || d.fit_rows > n_labeled)
        throw DomainError("build_design: scaler window must cover 2..n_labeled rows");

    // Standardize on the fit window only; constant columns (e.g. trends whose
    // kink falls after the window) keep sd = 1 so they stay centered at zero.
    const auto W = d.fit_rows;
    d.scaler.col_mean.resize(K);
    d.scaler.col_sd.resize(K);
    for (Eigen::Index c = 0; c < K; ++c) {
        const double m = d.X.col(c).head(W).mean();
        const double var =
            (d.X.col(c).head(W).array() - m).square().sum() / static_cast<double>(W - 1);
        d.scaler.col_mean[c] = m;
        d.scaler.col_sd[c] = var > 1e-24 ? std::sqrt(var) : 1.0;
        d.X.col(c) = (d.X.col(c).array() - m) / d.scaler.col_sd[c];
    }
    const double ym = d.y.head(W).mean();
    const double yvar = (d.y.head(W).array() - ym).square().sum() / static_cast<double>(W - 1);
    d.scaler.y_mean = ym;
    d.scaler.y_sd = yvar > 1e-24 ? std::sqrt(yvar) : 1.0;
    for (Eigen::Index r = 0; r < n_labeled; ++r) d.y[r] = (d.y[r] - ym) / d.scaler.y_sd;
    return d;
}

Vector design_row_for_origin(const TimeSeriesPanel& transformed, const DesignMatrix& ref,
                             Eigen::Index panel_row) {
    const int n_lags = ref.n_lags;
    if (panel_row < n_lags - 1 || panel_row >= transformed.rows())
        throw DomainError("design_row_for_origin: origin outside the panel");
    const Eigen::Index N = transformed.n_series();
    const auto K = static_cast<Eigen::Index>(ref.column_names.size());
    Vector x(K);
    for (Eigen::Index j = 0; j < N; ++j)
        for (int l = 0; l < n_lags; ++l)
            x[j * n_lags + l] = transformed.values(panel_row - l, j);
    const double r = static_cast<double>(panel_row - (n_lags - 1));
    for (int q = 0; q < ref.n_trends; ++q)
        x[N * n_lags + q] =
            std::max(0.0, r - ref.trend_kinks[static_cast<std::size_t>(q)]) / ref.trend_denom;
    return (x - ref.scaler.col_mean).cwiseQuotient(ref.scaler.col_sd);
}

}  // namespace hnn::data
