#pragma once

#include "hnn/common.hpp"

#include <string>
#include <vector>

namespace hnn::data {

struct Date {
    int year = 1960;
    int month = 1;
    int day = 1;

    static Date parse(const std::string& iso);
    std::string to_string() const;
    Date plus_months(int m) const;

    friend bool operator==(const Date& a, const Date& b) {
        return a.year == b.year && a.month == b.month && a.day == b.day;
    }
    friend bool operator<(const Date& a, const Date& b) {
        if (a.year != b.year) return a.year < b.year;
        if (a.month != b.month) return a.month < b.month;
        return a.day < b.day;
    }
    friend bool operator<=(const Date& a, const Date& b) { return a < b || a == b; }
};

enum class TransformCode { Level, Diff, Diff2, Log, LogDiff, LogDiff2, PctChange };

TransformCode parse_transform_code(const std::string& s);
std::string transform_code_name(TransformCode c);

// Dated multivariate panel. Missing values are NaN; the mask is implicit.
struct TimeSeriesPanel {
    std::vector<Date> dates;
    std::vector<std::string> names;
    std::vector<TransformCode> codes;
    Matrix values;  // T x N
    bool imputation_converged = true;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index n_series() const { return values.cols(); }

    int column(const std::string& name) const;
    bool has_missing() const { return !values.allFinite(); }
    void validate() const;
    TimeSeriesPanel head(Eigen::Index n_rows) const;
};

// CSV with an ISO-date first column and a header row of series names.
TimeSeriesPanel load_panel_csv(const std::string& path, const std::string& transform_path);
void save_panel_csv(const TimeSeriesPanel& panel, const std::string& path,
                    const std::string& transform_path);

}  // namespace hnn::data
