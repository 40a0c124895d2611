#pragma once

#include "hnn/data/panel.hpp"

#include <utility>
#include <vector>

namespace hnn::data {

struct Scaler {
    Vector col_mean, col_sd;
    double y_mean = 0.0;
    double y_sd = 1.0;
};

// Standardized regressor matrix (lags + hockey-stick trends) aligned so row t
// predicts the target at t + horizon. Rows beyond `n_labeled` are forecast
// origins whose targets are not yet observed.
struct DesignMatrix {
    Matrix X;  // R x K, standardized
    Vector y;  // standardized; NaN past n_labeled
    Eigen::Index n_labeled = 0;
    int horizon = 1;
    int n_lags = 2;
    int n_trends = 0;
    std::vector<std::string> column_names;
    std::vector<std::pair<std::string, std::vector<int>>> column_groups;
    std::vector<Date> origin_dates;
    std::vector<Date> target_dates;  // valid for labeled rows
    Scaler scaler;
    Eigen::Index fit_rows = 0;       // scaler window [0, fit_rows)
    std::vector<double> trend_kinks; // in design-row units
    double trend_denom = 1.0;

    Eigen::Index n_rows() const { return X.rows(); }
    Eigen::Index n_cols() const { return X.cols(); }
    const std::vector<int>& group(const std::string& name) const;
};

// fit_rows < 0 means: fit the scaler on every labeled row.
DesignMatrix build_design(const TimeSeriesPanel& panel, const std::string& target, int horizon,
                          int n_lags = 2, int n_trends = 100, Eigen::Index fit_rows = -1);

// Standardized regressor row for a forecast origin at `panel_row` of a panel
// that extends the one `ref` was built from. Uses the reference scaler and
// trend layout, so nothing after `panel_row` leaks in.
Vector design_row_for_origin(const TimeSeriesPanel& transformed, const DesignMatrix& ref,
                             Eigen::Index panel_row);

struct DensityForecast {
    enum class Segment { InSampleOob, OutOfSample };
    Vector mean;      // original target units
    Vector variance;  // original target units
    Segment segment = Segment::OutOfSample;
};

inline DensityForecast inverse_scale(const Vector& mean_std, const Vector& var_std,
                                     const Scaler& scaler,
                                     DensityForecast::Segment segment =
                                         DensityForecast::Segment::OutOfSample) {
    DensityForecast f;
    f.mean = (mean_std.array() * scaler.y_sd + scaler.y_mean).matrix();
    f.variance = (var_std.array() * scaler.y_sd * scaler.y_sd).matrix();
    f.segment = segment;
    return f;
}

}  // namespace hnn::data
