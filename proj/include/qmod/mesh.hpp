#pragma once

#include <qmod/geometry.hpp>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace qmod {

using Index = std::uint32_t;
using Triangle = std::array<Index, 3>;

struct BoundaryEdge
{
    std::array<Index, 2> vertices;  ///< in counterclockwise boundary order
    Arc arc;
};

/// Conforming triangulation of a quadrilateral with arc-labelled boundary.
///
/// Triangles are counterclockwise. refinement_edge[t] is the local index of
/// the vertex opposite the edge that newest-vertex bisection will split.
struct TriMesh
{
    std::vector<Point> vertices;
    std::vector<Triangle> triangles;
    std::vector<BoundaryEdge> boundary_edges;
    std::vector<std::uint8_t> refinement_edge;

    std::size_t num_vertices() const { return vertices.size(); }
    std::size_t num_triangles() const { return triangles.size(); }

    double triangle_area(std::size_t t) const;
    double total_area() const;
    /// Smallest interior angle of triangle t, in radians.
    double min_angle(std::size_t t) const;
    double min_angle() const;
};

struct TriangulationOptions
{
    double max_area = 0.0;                   ///< <= 0 selects polygon area / 64
    double min_angle_degrees = 20.0;
    std::size_t max_vertices = 200000;
};

/// Conforming triangulation of the polygon interior with boundary edges
/// labelled by arc. Throws MeshError for degenerate input.
TriMesh triangulate(const PolygonQuad & q, const TriangulationOptions & options = {});
TriMesh triangulate(const PolygonQuad & q, double max_area);

/// Result of a bisection step: the refined mesh and, for every vertex created,
/// the endpoints of the edge it bisects (in creation order).
struct Refinement
{
    TriMesh mesh;
    std::vector<std::array<Index, 2>> new_vertex_parents;
};

/// Newest-vertex bisection of the marked triangles plus the closure needed
/// to keep the mesh conforming.
Refinement bisect_with_history(const TriMesh & m, std::span<const Index> marked);
TriMesh bisect(const TriMesh & m, std::span<const Index> marked);

/// Extends a nodal field to a refined mesh by linear interpolation at the
/// new midpoints.
std::vector<double> prolongate(const Refinement & r, std::span<const double> coarse);

/// Structural audit result. Empty `problems` means the mesh is valid.
struct MeshAudit
{
    std::vector<std::string> problems;
    bool ok() const { return problems.empty(); }
};

/// Brute-force checks: positive orientation, every interior edge shared by
/// exactly two triangles, boundary edges exactly those used once, a single
/// closed boundary loop, and arc labels that change only at four places.
MeshAudit audit(const TriMesh & m);

/// Debug dump: a line `m t`, then m lines `x y`, then t lines `i j k`,
/// then a line `b` followed by b lines `i j arc` (arc in 1..4).
void write_mesh(std::ostream & out, const TriMesh & m);

} // namespace qmod
