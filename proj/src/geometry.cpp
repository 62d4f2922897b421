#include <qmod/geometry.hpp>
#include <qmod/errors.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace qmod {

using std::numbers::pi;

double norm(Point a) { return std::hypot(a.x, a.y); }

double orient2d(Point a, Point b, Point c)
{
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

double signed_area(const std::vector<Point> & polygon)
{
    double twice = 0.0;
    const std::size_t m = polygon.size();
    for (std::size_t i = 0; i < m; ++i) {
        twice += cross(polygon[i], polygon[(i + 1) % m]);
    }
    return 0.5 * twice;
}

namespace {

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool on_segment(Point p, Point a, Point b)
{
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x)
        && std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point p1, Point p2, Point q1, Point q2)
{
    const int d1 = sign(orient2d(q1, q2, p1));
    const int d2 = sign(orient2d(q1, q2, p2));
    const int d3 = sign(orient2d(p1, p2, q1));
    const int d4 = sign(orient2d(p1, p2, q2));
    if (d1 * d2 < 0 && d3 * d4 < 0) return true;
    if (d1 == 0 && on_segment(p1, q1, q2)) return true;
    if (d2 == 0 && on_segment(p2, q1, q2)) return true;
    if (d3 == 0 && on_segment(q1, p1, p2)) return true;
    if (d4 == 0 && on_segment(q2, p1, p2)) return true;
    return false;
}

// Points from p towards q (q excluded) along the circle (center, radius),
// taking the shorter way round.
void sample_arc(std::vector<Point> & out, Point center, double radius, Point p, Point q, int n)
{
    const double phi_p = std::atan2(p.y - center.y, p.x - center.x);
    const double phi_q = std::atan2(q.y - center.y, q.x - center.x);
    const double delta = std::remainder(phi_q - phi_p, 2.0 * pi);
    out.push_back(p);
    for (int k = 1; k < n; ++k) {
        const double phi = phi_p + delta * static_cast<double>(k) / n;
        out.push_back({center.x + radius * std::cos(phi), center.y + radius * std::sin(phi)});
    }
}

} // namespace

bool is_simple(const std::vector<Point> & polygon)
{
    const std::size_t m = polygon.size();
    if (m < 3) return false;
    for (std::size_t i = 0; i < m; ++i) {
        if (polygon[i] == polygon[(i + 1) % m]) return false;
    }
    for (std::size_t i = 0; i < m; ++i) {
        const Point a = polygon[i];
        const Point b = polygon[(i + 1) % m];
        for (std::size_t j = i + 1; j < m; ++j) {
            const Point c = polygon[j];
            const Point d = polygon[(j + 1) % m];
            if (j == i + 1) {
                // Shared vertex b == c: fail if the edges fold back onto each other.
                if (orient2d(a, b, d) == 0.0 && dot(a - b, d - b) > 0.0) return false;
                continue;
            }
            if (i == 0 && j == m - 1) {
                if (orient2d(c, a, b) == 0.0 && dot(c - a, b - a) > 0.0) return false;
                continue;
            }
            if (segments_intersect(a, b, c, d)) return false;
        }
    }
    return true;
}

PolygonQuad::PolygonQuad(std::vector<Point> vertices, std::array<std::size_t, 4> corners)
    : _vertices(std::move(vertices)), _corners(corners)
{
    const std::size_t m = _vertices.size();
    if (m < 4) {
        throw GeometryError("a quadrilateral needs at least four vertices");
    }
    for (const auto & p : _vertices) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw GeometryError("non-finite vertex coordinate");
        }
    }
    for (std::size_t j = 0; j < 4; ++j) {
        if (_corners[j] >= m) {
            throw GeometryError("corner index out of range");
        }
        if (j > 0 && _corners[j] <= _corners[j - 1]) {
            throw GeometryError("corner indices must be strictly increasing");
        }
    }
    if (!is_simple(_vertices)) {
        throw GeometryError("polygon is not simple");
    }
    if (!(signed_area(_vertices) > 0.0)) {
        throw GeometryError("polygon must be positively oriented");
    }
}

Arc PolygonQuad::edge_arc(std::size_t i) const
{
    // Edge i starts at vertex i; it belongs to the arc of the last corner at or before i.
    for (int j = 3; j >= 0; --j) {
        if (i >= _corners[static_cast<std::size_t>(j)]) return static_cast<Arc>(j);
    }
    return Arc::gamma4;
}

double PolygonQuad::area() const { return signed_area(_vertices); }

double PolygonQuad::interior_angle(std::size_t i) const
{
    const std::size_t m = _vertices.size();
    const Point prev = _vertices[(i + m - 1) % m];
    const Point cur = _vertices[i];
    const Point next = _vertices[(i + 1) % m];
    const Point u = next - cur;
    const Point v = prev - cur;
    double angle = std::atan2(cross(u, v), dot(u, v));
    if (angle < 0.0) angle += 2.0 * pi;
    return angle;
}

PolygonQuad PolygonQuad::conjugate() const
{
    // Rotate the vertex list so that z2 becomes index 0.
    const std::size_t m = _vertices.size();
    const std::size_t start = _corners[1];
    std::vector<Point> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = _vertices[(i + start) % m];
    std::array<std::size_t, 4> c{};
    for (std::size_t j = 0; j < 4; ++j) {
        c[j] = (_corners[(j + 1) % 4] + m - start) % m;
    }
    return PolygonQuad(std::move(v), c);
}

PolygonQuad PolygonQuad::transformed(double scale, double angle, Point shift) const
{
    const double cs = std::cos(angle);
    const double sn = std::sin(angle);
    std::vector<Point> v;
    v.reserve(_vertices.size());
    for (const auto & p : _vertices) {
        v.push_back({scale * (cs * p.x - sn * p.y) + shift.x, scale * (sn * p.x + cs * p.y) + shift.y});
    }
    return PolygonQuad(std::move(v), _corners);
}

PolygonQuad quad_from_corners(Point z1, Point z2, Point z3, Point z4)
{
    return PolygonQuad({z1, z2, z3, z4}, {0, 1, 2, 3});
}

PolygonQuad parallelogram(double t, double h)
{
    if (!(t > 0.0 && t <= pi / 2) || !(h > 0.0) || !std::isfinite(h)) {
        throw GeometryError("parallelogram requires 0 < t <= pi/2 and h > 0");
    }
    // cos(pi/2) is not exactly zero in floating point.
    const Point w = (t == pi / 2) ? Point{0.0, h} : Point{h * std::cos(t), h * std::sin(t)};
    return quad_from_corners({1.0 + w.x, w.y}, w, {0.0, 0.0}, {1.0, 0.0});
}

PolygonQuad trapezoid(double h)
{
    if (!(h > 1.0) || !std::isfinite(h)) {
        throw GeometryError("trapezoid requires h > 1");
    }
    return quad_from_corners({1.0, h}, {0.0, h - 1.0}, {0.0, 0.0}, {1.0, 0.0});
}

Point circular_quad_corner(double theta, double r)
{
    if (!(theta > 0.0 && theta < pi / 2) || !(r > 0.0 && r < 1.0)) {
        throw GeometryError("circular quadrilateral requires 0 < theta < pi/2 and 0 < r < 1");
    }
    // Circle orthogonal to the unit circle at e^{i theta} and e^{i(pi - theta)}.
    const Point c1{0.0, 1.0 / std::sin(theta)};
    const double r1 = std::cos(theta) / std::sin(theta);
    // Circle through r, i, -i.
    const Point c2{-(1.0 - r) * (1.0 + r) / (2.0 * r), 0.0};
    const double r2 = (1.0 + r * r) / (2.0 * r);

    const Point dc = c2 - c1;
    const double d = norm(dc);
    const double along = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    const double across2 = r1 * r1 - along * along;
    if (!(across2 > 0.0)) {
        throw GeometryError("boundary circles of the circular quadrilateral do not intersect");
    }
    const double across = std::sqrt(across2);
    const Point base = c1 + (along / d) * dc;
    const Point perp{-dc.y / d, dc.x / d};
    const Point cand[2] = {base + across * perp, base - across * perp};
    for (const auto & p : cand) {
        if (p.x > 0.0 && p.y > 0.0 && norm(p) < 1.0) return p;
    }
    throw GeometryError("boundary circles of the circular quadrilateral meet outside the unit disk");
}

PolygonQuad discretize_circular_quad(double theta, double r, int n)
{
    if (n < 2) {
        throw GeometryError("need at least two segments per arc");
    }
    const Point d = circular_quad_corner(theta, r);
    const Point a{-d.x, d.y};
    const Point b{-d.x, -d.y};
    const Point c{d.x, -d.y};

    const double side_offset = (1.0 - r) * (1.0 + r) / (2.0 * r);
    const double side_radius = (1.0 + r * r) / (2.0 * r);
    const double cap_offset = 1.0 / std::sin(theta);
    const double cap_radius = std::cos(theta) / std::sin(theta);

    std::vector<Point> v;
    v.reserve(static_cast<std::size_t>(4 * n));
    sample_arc(v, {side_offset, 0.0}, side_radius, a, b, n);   // through -r
    sample_arc(v, {0.0, -cap_offset}, cap_radius, b, c, n);    // lower arc
    sample_arc(v, {-side_offset, 0.0}, side_radius, c, d, n);  // through r
    sample_arc(v, {0.0, cap_offset}, cap_radius, d, a, n);     // upper arc

    const auto un = static_cast<std::size_t>(n);
    return PolygonQuad(std::move(v), {0, un, 2 * un, 3 * un});
}

PolygonQuad read_polygon(std::istream & in)
{
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        lines.push_back(line);
    }
    if (lines.empty()) {
        throw GeometryError("polygon file is empty");
    }

    auto fail = [](const std::string & msg) -> PolygonQuad { throw GeometryError("polygon file: " + msg); };

    std::istringstream header(lines[0]);
    long long m = 0;
    std::array<long long, 4> k{};
    if (!(header >> m >> k[0] >> k[1] >> k[2] >> k[3])) {
        return fail("header must be `m k1 k2 k3 k4`");
    }
    std::string extra;
    if (header >> extra) return fail("trailing tokens in header");
    if (m < 4) return fail("vertex count must be at least 4");
    if (static_cast<long long>(lines.size()) - 1 != m) {
        return fail("expected " + std::to_string(m) + " vertex lines, found " + std::to_string(lines.size() - 1));
    }

    std::vector<Point> v;
    v.reserve(static_cast<std::size_t>(m));
    for (long long i = 1; i <= m; ++i) {
        std::istringstream row(lines[static_cast<std::size_t>(i)]);
        Point p;
        if (!(row >> p.x >> p.y)) return fail("bad vertex line " + std::to_string(i));
        if (row >> extra) return fail("trailing tokens on vertex line " + std::to_string(i));
        v.push_back(p);
    }
    std::array<std::size_t, 4> corners{};
    for (std::size_t j = 0; j < 4; ++j) {
        if (k[j] < 0 || k[j] >= m) return fail("corner index out of range");
        corners[j] = static_cast<std::size_t>(k[j]);
    }
    return PolygonQuad(std::move(v), corners);
}

PolygonQuad read_polygon_file(const std::string & path)
{
    std::ifstream in(path);
    if (!in) {
        throw GeometryError("cannot open polygon file " + path);
    }
    return read_polygon(in);
}

void write_polygon(std::ostream & out, const PolygonQuad & q)
{
    out << q.size();
    for (auto c : q.corners()) out << ' ' << c;
    out << '\n' << std::setprecision(17);
    for (const auto & p : q.vertices()) out << p.x << ' ' << p.y << '\n';
}

} // namespace qmod
