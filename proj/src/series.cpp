#include "ricci/series.hpp"

#include "ricci/error.hpp"
#include "number_text.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace ricci {

namespace {

using Member = double DiagnosticRow::*;

constexpr std::array<Member, kSeriesColumns.size()> kMembers = {
    &DiagnosticRow::t,          &DiagnosticRow::sup_R, &DiagnosticRow::inf_R, &DiagnosticRow::sup_gradf2,
    &DiagnosticRow::sup_H,      &DiagnosticRow::sup_gradR2, &DiagnosticRow::sup_hess2R, &DiagnosticRow::sup_F,
    &DiagnosticRow::sup_G,      &DiagnosticRow::sup_J, &DiagnosticRow::area, &DiagnosticRow::sup_w};

Member member_for(std::string_view column) {
    for (std::size_t c = 0; c < kSeriesColumns.size(); ++c) {
        if (kSeriesColumns[c] == column) return kMembers[c];
    }
    throw InvalidArgument(fmt::format("unknown series column '{}'", column));
}

}  // namespace

double column_value(const DiagnosticRow& row, std::string_view column) {
    return row.*member_for(column);
}

void DiagnosticSeries::append(const DiagnosticRow& row) {
    for (std::string_view name : kSeriesColumns) {
        if (!std::isfinite(column_value(row, name))) {
            throw NumericalError(fmt::format("diagnostic '{}' is not finite at t = {}", name, row.t));
        }
    }
    if (!rows_.empty() && !(row.t > rows_.back().t)) {
        throw InvalidArgument(fmt::format("series times must increase ({} after {})", row.t, rows_.back().t));
    }
    rows_.push_back(row);
}

std::vector<double> DiagnosticSeries::column(std::string_view name) const {
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const DiagnosticRow& row : rows_) out.push_back(column_value(row, name));
    return out;
}

void write_series_csv(std::ostream& out, const DiagnosticSeries& series) {
    std::string line;
    for (std::size_t c = 0; c < kSeriesColumns.size(); ++c) {
        if (c > 0) line += ',';
        line += kSeriesColumns[c];
    }
    out << line << '\n';
    for (const DiagnosticRow& row : series.rows()) {
        line.clear();
        for (std::size_t c = 0; c < kSeriesColumns.size(); ++c) {
            if (c > 0) line += ',';
            line += fmt::format("{:.17g}", column_value(row, kSeriesColumns[c]));
        }
        out << line << '\n';
    }
}

DiagnosticSeries read_series_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("series CSV is empty");
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) header.push_back(cell);
    }
    std::vector<Member> members;
    try {
        for (const std::string& name : header) members.push_back(member_for(name));
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }

    DiagnosticSeries series;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        DiagnosticRow row;
        std::istringstream rs(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(rs, cell, ',')) {
            if (c >= header.size()) throw ConfigError(fmt::format("series CSV line {} has too many cells", line_no));
            const auto value = detail::parse_double(cell);
            if (!value) throw ConfigError(fmt::format("series CSV line {}: bad number '{}'", line_no, cell));
            row.*members[c] = *value;
            ++c;
        }
        if (c != header.size()) throw ConfigError(fmt::format("series CSV line {} has {} cells", line_no, c));
        series.append(row);
    }
    return series;
}

void write_series_csv_file(const std::string& path, const DiagnosticSeries& series) {
    std::ofstream out(path);
    if (!out) throw Error(fmt::format("cannot open '{}' for writing", path));
    write_series_csv(out, series);
}

DiagnosticSeries read_series_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open series file '{}'", path));
    return read_series_csv(in);
}

}  // namespace ricci
