#pragma once

#include "hnn/data/panel.hpp"

namespace hnn::data {

// Number of leading observations a code consumes.
inline int transform_lead(TransformCode c) {
    switch (c) {
        case TransformCode::Level:
        case TransformCode::Log: return 0;
        case TransformCode::Diff:
        case TransformCode::LogDiff:
        case TransformCode::PctChange: return 1;
        case TransformCode::Diff2:
        case TransformCode::LogDiff2: return 2;
    }
    return 0;
}

// Applies each column's stationarity transform and trims the rows lost to
// differencing from the front, consistently across columns.
TimeSeriesPanel apply_transforms(const TimeSeriesPanel& panel);

// Stock-Watson style factor EM: initialize missing entries with column means,
// then iterate (standardize -> principal-components fit -> refill missing)
// until the largest imputed-value change drops below `tol`.
TimeSeriesPanel impute_missing(const TimeSeriesPanel& panel, int n_factors = 8,
                               int max_iter = 50, double tol = 1e-6);

}  // namespace hnn::data
