#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ricci {

/// One time sample of every tracked window supremum.
struct DiagnosticRow {
    double t = 0.0;
    double sup_R = 0.0;
    double inf_R = 0.0;
    double sup_gradf2 = 0.0;
    double sup_H = 0.0;
    double sup_gradR2 = 0.0;
    double sup_hess2R = 0.0;
    double sup_F = 0.0;
    double sup_G = 0.0;
    double sup_J = 0.0;
    double area = 0.0;
    double sup_w = 0.0;
    /// Flow steps taken before this row. Not serialized.
    std::size_t step = 0;
};

/// CSV column names, in file order.
inline constexpr std::array<std::string_view, 12> kSeriesColumns = {
    "t",     "sup_R", "inf_R", "sup_gradf2", "sup_H", "sup_gradR2",
    "sup_hess2R", "sup_F", "sup_G", "sup_J", "area", "sup_w"};

/// Value of a named column. Throws InvalidArgument for unknown names.
double column_value(const DiagnosticRow& row, std::string_view column);

/// Time-ordered diagnostic rows. Times strictly increase and entries are finite.
class DiagnosticSeries {
public:
    void append(const DiagnosticRow& row);

    const std::vector<DiagnosticRow>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }
    const DiagnosticRow& front() const { return rows_.front(); }
    const DiagnosticRow& back() const { return rows_.back(); }

    std::vector<double> column(std::string_view name) const;

private:
    std::vector<DiagnosticRow> rows_;
};

void write_series_csv(std::ostream& out, const DiagnosticSeries& series);
DiagnosticSeries read_series_csv(std::istream& in);
void write_series_csv_file(const std::string& path, const DiagnosticSeries& series);
DiagnosticSeries read_series_csv_file(const std::string& path);

}  // namespace ricci
