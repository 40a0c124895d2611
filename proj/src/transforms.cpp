#include "hnn/data/transforms.hpp"

#include <cmath>
#include <iostream>

namespace hnn::data {

namespace {

double safe_log(const TimeSeriesPanel& panel, Eigen::Index t, Eigen::Index j) {
    const double v = panel.values(t, j);
    if (std::isnan(v)) return v;
    if (v <= 0.0)
        throw DomainError("log transform of nonpositive value in series '" +
                          panel.names[static_cast<std::size_t>(j)] + "' at " +
                          panel.dates[static_cast<std::size_t>(t)].to_string());
    return std::log(v);
}

}  // namespace

TimeSeriesPanel apply_transforms(const TimeSeriesPanel& panel) {
    panel.validate();
    int lead = 0;
    for (auto c : panel.codes) lead = std::max(lead, transform_lead(c));
    if (panel.rows() <= lead)
        throw DomainError("apply_transforms: panel too short for the requested codes");

    const Eigen::Index T = panel.rows();
    const Eigen::Index N = panel.n_series();
    Matrix out(T - lead, N);
    for (Eigen::Index j = 0; j < N; ++j) {
        const auto code = panel.codes[static_cast<std::size_t>(j)];
        for (Eigen::Index t = lead; t < T; ++t) {
            double v = std::nan("");
            switch (code) {
                case TransformCode::Level: v = panel.values(t, j); break;
                case TransformCode::Diff: v = panel.values(t, j) - panel.values(t - 1, j); break;
                case TransformCode::Diff2:
                    v = panel.values(t, j) - 2.0 * panel.values(t - 1, j) +
                        panel.values(t - 2, j);
                    break;
                case TransformCode::Log: v = safe_log(panel, t, j); break;
                case TransformCode::LogDiff:
                    v = safe_log(panel, t, j) - safe_log(panel, t - 1, j);
                    break;
                case TransformCode::LogDiff2:
                    v = safe_log(panel, t, j) - 2.0 * safe_log(panel, t - 1, j) +
                        safe_log(panel, t - 2, j);
                    break;
                case TransformCode::PctChange:
                    v = (panel.values(t, j) - panel.values(t - 1, j)) / panel.values(t - 1, j);
                    break;
            }
            out(t - lead, j) = v;
        }
    }
    TimeSeriesPanel r;
    r.dates.assign(panel.dates.begin() + lead, panel.dates.end());
    r.names = panel.names;
    r.codes.assign(panel.names.size(), TransformCode::Level);
    r.values = std::move(out);
    r.imputation_converged = panel.imputation_converged;
    return r;
}

TimeSeriesPanel impute_missing(const TimeSeriesPanel& panel, int n_factors, int max_iter,
                               double tol) {
    panel.validate();
    if (!panel.has_missing()) return panel;

    const Eigen::Index T = panel.rows();
    const Eigen::Index N = panel.n_series();
    for (Eigen::Index j = 0; j < N; ++j)
        if (panel.values.col(j).array().isNaN().all())
            throw DomainError("impute_missing: series '" +
                              panel.names[static_cast<std::size_t>(j)] + "' is entirely missing");
    bool any_complete_row = false;
    for (Eigen::Index t = 0; t < T && !any_complete_row; ++t)
        any_complete_row = panel.values.row(t).allFinite();
    if (!any_complete_row)
        throw DomainError("impute_missing: needs at least one fully observed row");

    const int k = std::min<int>(n_factors, static_cast<int>(std::min(T, N)));
    TimeSeriesPanel out = panel;
    Matrix& X = out.values;

    // column means over observed entries
    for (Eigen::Index j = 0; j < N; ++j) {
        double sum = 0.0;
        Eigen::Index n = 0;
        for (Eigen::Index t = 0; t < T; ++t)
            if (!std::isnan(panel.values(t, j))) {
                sum += panel.values(t, j);
                ++n;
            }
        const double m = sum / static_cast<double>(n);
        for (Eigen::Index t = 0; t < T; ++t)
            if (std::isnan(X(t, j))) X(t, j) = m;
    }

    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        Vector mu(N), sd(N);
        for (Eigen::Index j = 0; j < N; ++j) {
            mu[j] = X.col(j).mean();
            const double var =
                (X.col(j).array() - mu[j]).square().sum() / static_cast<double>(T - 1);
            sd[j] = var > 1e-24 ? std::sqrt(var) : 1.0;
        }
        Matrix Z = (X.rowwise() - mu.transpose()).array().rowwise() / sd.transpose().array();
        Eigen::BDCSVD<Matrix> svd(Z, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Matrix fit = svd.matrixU().leftCols(k) *
                           svd.singularValues().head(k).asDiagonal() *
                           svd.matrixV().leftCols(k).transpose();
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < N; ++j)
            for (Eigen::Index t = 0; t < T; ++t)
                if (std::isnan(panel.values(t, j))) {
                    const double v = fit(t, j) * sd[j] + mu[j];
                    max_change = std::max(max_change, std::abs(v - X(t, j)));
                    X(t, j) = v;
                }
        if (max_change < tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        out.imputation_converged = false;
        std::cerr << "warning: factor-EM imputation did not converge in " << max_iter
                  << " iterations; returning last iterate\n";
    }
    return out;
}

}  // namespace hnn::data
