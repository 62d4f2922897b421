#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qmod {

/// Rectangular table of reals with named columns and free-form metadata.
class GridReport
{
public:
    explicit GridReport(std::vector<std::string> columns);

    /// Throws std::invalid_argument unless the row has one value per column.
    void add_row(std::vector<double> row);
    void set_metadata(const std::string & key, const std::string & value);

    const std::vector<std::string> & columns() const { return _columns; }
    const std::vector<std::vector<double>> & rows() const { return _rows; }
    const std::vector<std::pair<std::string, std::string>> & metadata() const { return _metadata; }

    /// Index of a named column; throws std::out_of_range if absent.
    std::size_t column(const std::string & name) const;
    std::vector<double> column_values(const std::string & name) const;

    /// A `#` metadata line (with timestamp when requested), one header line,
    /// then rows with 9 significant digits.
    void write_csv(std::ostream & out, bool with_timestamp = true) const;

    /// Heatmap of `value` over the (x, y) grid, colored by a fixed 256-step
    /// ramp between the value's minimum and maximum.
    void write_svg_heatmap(std::ostream & out, const std::string & x, const std::string & y,
                           const std::string & value, const std::string & title) const;

private:
    std::vector<std::string> _columns;
    std::vector<std::vector<double>> _rows;
    std::vector<std::pair<std::string, std::string>> _metadata;
};

/// Reals formatted the way the CSV writer does ("%.9g").
std::string format_real(double v);

} // namespace qmod
