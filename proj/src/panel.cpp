#include "hnn/data/panel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace hnn::data {

Date Date::parse(const std::string& iso) {
    int y = 0, m = 0, d = 0;
    if (std::sscanf(iso.c_str(), "%d-%d-%d", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 ||
        d > 31)
        throw DataError("bad ISO date: '" + iso + "'");
    return Date{y, m, d};
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

Date Date::plus_months(int m) const {
    const int total = year * 12 + (month - 1) + m;
    Date r;
    r.year = total / 12;
    r.month = total % 12 + 1;
    r.day = day;
    return r;
}

TransformCode parse_transform_code(const std::string& s) {
    if (s == "level") return TransformCode::Level;
    if (s == "diff") return TransformCode::Diff;
    if (s == "diff2") return TransformCode::Diff2;
    if (s == "log") return TransformCode::Log;
    if (s == "logDiff") return TransformCode::LogDiff;
    if (s == "logDiff2") return TransformCode::LogDiff2;
    if (s == "pctChange") return TransformCode::PctChange;
    throw DataError("unknown transform code: '" + s + "'");
}

std::string transform_code_name(TransformCode c) {
    switch (c) {
        case TransformCode::Level: return "level";
        case TransformCode::Diff: return "diff";
        case TransformCode::Diff2: return "diff2";
        case TransformCode::Log: return "log";
        case TransformCode::LogDiff: return "logDiff";
        case TransformCode::LogDiff2: return "logDiff2";
        case TransformCode::PctChange: return "pctChange";
    }
    return "level";
}

int TimeSeriesPanel::column(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    throw DataError("panel has no series named '" + name + "'");
}

void TimeSeriesPanel::validate() const {
    if (static_cast<Eigen::Index>(dates.size()) != values.rows())
        throw DataError("panel: date count does not match row count");
    if (static_cast<Eigen::Index>(names.size()) != values.cols() || codes.size() != names.size())
        throw DataError("panel: column metadata does not match value matrix");
    for (std::size_t t = 1; t < dates.size(); ++t)
        if (!(dates[t - 1] < dates[t]))
            throw DataError("panel: dates must be strictly increasing at row " +
                            std::to_string(t));
}

TimeSeriesPanel TimeSeriesPanel::head(Eigen::Index n_rows) const {
    if (n_rows > rows()) throw DataError("panel.head: not enough rows");
    TimeSeriesPanel out;
    out.dates.assign(dates.begin(), dates.begin() + n_rows);
    out.names = names;
    out.codes = codes;
    out.values = values.topRows(n_rows);
    out.imputation_converged = imputation_converged;
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    out.push_back(cell);
    return out;
}

bool is_missing_cell(const std::string& s) {
    return s.empty() || s == "NA" || s == "nan" || s == "NaN";
}

}  // namespace

TimeSeriesPanel load_panel_csv(const std::string& path, const std::string& transform_path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open panel file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty panel file: " + path);
    auto header = split_csv_line(line);
    if (header.size() < 2) throw DataError("panel header needs a date column and one series");

    TimeSeriesPanel panel;
    panel.names.assign(header.begin() + 1, header.end());

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError("panel row " + std::to_string(rows.size() + 2) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
        panel.dates.push_back(Date::parse(cells[0]));
        std::vector<double> row(cells.size() - 1);
        for (std::size_t j = 1; j < cells.size(); ++j)
            row[j - 1] = is_missing_cell(cells[j]) ? std::nan("") : std::stod(cells[j]);
        rows.push_back(std::move(row));
    }
    panel.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(panel.names.size()));
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t j = 0; j < rows[t].size(); ++j)
            panel.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = rows[t][j];

    std::ifstream tf(transform_path);
    if (!tf) throw DataError("cannot open transform-code file: " + transform_path);
    std::map<std::string, TransformCode> codes;
    while (std::getline(tf, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 2)
            throw DataError("transform-code line must be 'name,code': " + line);
        codes[cells[0]] = parse_transform_code(cells[1]);
    }
    panel.codes.resize(panel.names.size());
    for (std::size_t j = 0; j < panel.names.size(); ++j) {
        auto it = codes.find(panel.names[j]);
        if (it == codes.end())
            throw DataError("no transform code for series '" + panel.names[j] + "'");
        panel.codes[j] = it->second;
    }
    panel.validate();
    return panel;
}

void save_panel_csv(const TimeSeriesPanel& panel, const std::string& path,
                    const std::string& transform_path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write panel file: " + path);
    out << "date";
    for (const auto& n : panel.names) out << ',' << n;
    out << '\n';
    out.precision(17);
    for (Eigen::Index t = 0; t < panel.rows(); ++t) {
        out << panel.dates[static_cast<std::size_t>(t)].to_string();
        for (Eigen::Index j = 0; j < panel.n_series(); ++j) {
            out << ',';
            const double v = panel.values(t, j);
            if (std::isnan(v))
                out << "NA";
            else
                out << v;
        }
        out << '\n';
    }
    std::ofstream tf(transform_path);
    if (!tf) throw DataError("cannot write transform-code file: " + transform_path);
    for (std::size_t j = 0; j < panel.names.size(); ++j)
        tf << panel.names[j] << ',' << transform_code_name(panel.codes[j]) << '\n';
}

}  // namespace hnn::data
