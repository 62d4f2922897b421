#include <qmod/report.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <map>
#include <ostream>
#include <stdexcept>

namespace qmod {

namespace {

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Anchors of the color ramp; the ramp itself is quantized to 256 levels.
constexpr std::array<std::array<double, 3>, 5> ramp_anchors{{
    {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37},
}};

std::string ramp_color(double t)
{
    const int level = std::clamp(static_cast<int>(std::floor(t * 256.0)), 0, 255);
    const double s = level / 255.0 * (ramp_anchors.size() - 1);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(s), ramp_anchors.size() - 2);
    const double w = s - static_cast<double>(k);
    char buf[8];
    int rgb[3];
    for (std::size_t c = 0; c < 3; ++c) {
        rgb[c] = static_cast<int>(std::lround((1.0 - w) * ramp_anchors[k][c] + w * ramp_anchors[k + 1][c]));
    }
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

} // namespace

std::string format_real(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

GridReport::GridReport(std::vector<std::string> columns) : _columns(std::move(columns)) {}

void GridReport::add_row(std::vector<double> row)
{
    if (row.size() != _columns.size()) {
        throw std::invalid_argument("row has " + std::to_string(row.size()) + " values, expected "
                                    + std::to_string(_columns.size()));
    }
    _rows.push_back(std::move(row));
}

void GridReport::set_metadata(const std::string & key, const std::string & value)
{
    for (auto & kv : _metadata) {
        if (kv.first == key) {
            kv.second = value;
            return;
        }
    }
    _metadata.emplace_back(key, value);
}

std::size_t GridReport::column(const std::string & name) const
{
    const auto it = std::find(_columns.begin(), _columns.end(), name);
    if (it == _columns.end()) throw std::out_of_range("no column named " + name);
    return static_cast<std::size_t>(it - _columns.begin());
}

std::vector<double> GridReport::column_values(const std::string & name) const
{
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(_rows.size());
    for (const auto & r : _rows) out.push_back(r[c]);
    return out;
}

void GridReport::write_csv(std::ostream & out, bool with_timestamp) const
{
    out << '#';
    for (const auto & [k, v] : _metadata) out << ' ' << k << '=' << v;
    if (with_timestamp) out << " timestamp=" << utc_timestamp();
    out << '\n';
    for (std::size_t c = 0; c < _columns.size(); ++c) out << (c ? "," : "") << _columns[c];
    out << '\n';
    for (const auto & row : _rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_real(row[c]);
        out << '\n';
    }
}

void GridReport::write_svg_heatmap(std::ostream & out, const std::string & x, const std::string & y,
                                   const std::string & value, const std::string & title) const
{
    const std::size_t cx = column(x), cy = column(y), cv = column(value);
    if (_rows.empty()) throw std::invalid_argument("cannot draw a heatmap of an empty report");
    std::map<double, int> xs, ys;
    for (const auto & r : _rows) {
        xs.emplace(r[cx], 0);
        ys.emplace(r[cy], 0);
    }
    int i = 0;
    for (auto & [k, v] : xs) v = i++;
    i = 0;
    for (auto & [k, v] : ys) v = i++;

    double lo = INFINITY, hi = -INFINITY;
    for (const auto & r : _rows) {
        if (std::isfinite(r[cv])) {
            lo = std::min(lo, r[cv]);
            hi = std::max(hi, r[cv]);
        }
    }
    if (!(lo <= hi)) lo = hi = 0.0;

    const int cell = 16, margin = 60, legend = 70;
    const int w = static_cast<int>(xs.size()) * cell, h = static_cast<int>(ys.size()) * cell;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w + 2 * margin + legend
        << "\" height=\"" << h + 2 * margin << "\">\n";
    out << "<text x=\"" << margin << "\" y=\"" << margin / 2 << "\" font-size=\"14\">" << title << "</text>\n";
    for (const auto & r : _rows) {
        const double t = (hi > lo) ? (r[cv] - lo) / (hi - lo) : 0.0;
        const int px = margin + xs[r[cx]] * cell;
        const int py = margin + h - (ys[r[cy]] + 1) * cell;
        out << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << cell << "\" height=\"" << cell
            << "\" fill=\"" << (std::isfinite(r[cv]) ? ramp_color(t) : "#ffffff") << "\"/>\n";
    }
    out << "<text x=\"" << margin + w / 2 << "\" y=\"" << margin + h + 30 << "\" font-size=\"12\">" << x << " ["
        << format_real(xs.begin()->first) << ", " << format_real(xs.rbegin()->first) << "]</text>\n";
    out << "<text x=\"10\" y=\"" << margin + h / 2 << "\" font-size=\"12\">" << y << "</text>\n";
    out << "<text x=\"10\" y=\"" << margin + h / 2 + 16 << "\" font-size=\"10\">["
        << format_real(ys.begin()->first) << ", " << format_real(ys.rbegin()->first) << "]</text>\n";
    const int lx = margin + w + 20;
    for (int k = 0; k < 256; ++k) {
        out << "<rect x=\"" << lx << "\" y=\"" << margin + h - (k + 1) * h / 256.0 << "\" width=\"16\" height=\""
            << h / 256.0 + 0.5 << "\" fill=\"" << ramp_color((k + 0.5) / 256.0) << "\"/>\n";
    }
    out << "<text x=\"" << lx + 20 << "\" y=\"" << margin + 10 << "\" font-size=\"10\">" << format_real(hi) << "</text>\n";
    out << "<text x=\"" << lx + 20 << "\" y=\"" << margin + h << "\" font-size=\"10\">" << format_real(lo) << "</text>\n";
    out << "</svg>\n";
}

} // namespace qmod
