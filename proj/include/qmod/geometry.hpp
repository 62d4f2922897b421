#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace qmod {

struct Point
{
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const Point &, const Point &) = default;
};

inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
double norm(Point a);
/// Twice the signed area of the triangle (a, b, c); positive when counterclockwise.
double orient2d(Point a, Point b, Point c);

/// Boundary arcs between consecutive marked corners.
enum class Arc : unsigned char { gamma1 = 0, gamma2 = 1, gamma3 = 2, gamma4 = 3 };

/// A polygon with four marked corners z1..z4 at strictly increasing vertex
/// indices. The boundary is traversed counterclockwise; arc gamma_j runs from
/// corner j to corner j+1 (cyclically).
class PolygonQuad
{
public:
    /// Validates and throws GeometryError on failure.
    PolygonQuad(std::vector<Point> vertices, std::array<std::size_t, 4> corners);

    const std::vector<Point> & vertices() const { return _vertices; }
    const std::array<std::size_t, 4> & corners() const { return _corners; }
    std::size_t size() const { return _vertices.size(); }

    Point corner(int j) const { return _vertices[_corners[static_cast<std::size_t>(j)]]; }

    /// Arc carrying the boundary edge from vertex i to vertex i+1 (mod size).
    Arc edge_arc(std::size_t i) const;

    double area() const;

    /// Interior angle at vertex i, in radians.
    double interior_angle(std::size_t i) const;

    /// The conjugate quadrilateral (D; z2, z3, z4, z1) on the same domain.
    PolygonQuad conjugate() const;

    /// Image under z -> s * e^{i angle} * z + shift.
    PolygonQuad transformed(double scale, double angle, Point shift = {}) const;

private:
    std::vector<Point> _vertices;
    std::array<std::size_t, 4> _corners;
};

/// Signed area of a closed polygon (shoelace).
double signed_area(const std::vector<Point> & polygon);

/// True when no two non-adjacent edges of the closed polygon intersect and
/// no adjacent edges overlap.
bool is_simple(const std::vector<Point> & polygon);

/// The straight-line quadrilateral QM(z1, z2, z3, z4).
PolygonQuad quad_from_corners(Point z1, Point z2, Point z3, Point z4);

/// (1 + h e^{it}, h e^{it}, 0, 1) for 0 < t <= pi/2, h > 0.
PolygonQuad parallelogram(double t, double h);

/// (1 + ih, i(h - 1), 0, 1) for h > 1.
PolygonQuad trapezoid(double h);

/// Polygonal approximation of the circular quadrilateral with parameters
/// (theta, r), n chords per arc, corners a, b, c, d in quadrants II, III, IV, I.
PolygonQuad discretize_circular_quad(double theta, double r, int n);

/// Corner d (first quadrant) of the circular quadrilateral.
Point circular_quad_corner(double theta, double r);

/// Polygon text format: a header line `m k1 k2 k3 k4` followed by m lines
/// `x y`. Blank lines and lines starting with '#' are ignored.
/// Throws GeometryError for malformed input.
PolygonQuad read_polygon(std::istream & in);
PolygonQuad read_polygon_file(const std::string & path);
void write_polygon(std::ostream & out, const PolygonQuad & q);

} // namespace qmod
