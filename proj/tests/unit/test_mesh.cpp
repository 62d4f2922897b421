#include <qmod/errors.hpp>
#include <qmod/geometry.hpp>
#include <qmod/mesh.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace qmod;

namespace {

const PolygonQuad unit_square = quad_from_corners({1, 1}, {0, 1}, {0, 0}, {1, 0});

// Unit square split along the diagonal (0,0)-(1,1).
TriMesh two_triangle_square()
{
    TriMesh m;
    m.vertices = {{1, 1}, {0, 1}, {0, 0}, {1, 0}};
    m.triangles = {{0, 1, 2}, {0, 2, 3}};
    m.boundary_edges = {{{0, 1}, Arc::gamma1}, {{1, 2}, Arc::gamma2}, {{2, 3}, Arc::gamma3}, {{3, 0}, Arc::gamma4}};
    m.refinement_edge = {1, 2};  // both split the shared diagonal
    return m;
}

std::vector<Index> all_triangles(const TriMesh & m)
{
    std::vector<Index> out(m.num_triangles());
    for (Index i = 0; i < out.size(); ++i) out[i] = i;
    return out;
}

} // namespace

TEST_CASE("triangulating the unit square conserves area")
{
    const auto m = triangulate(unit_square, 1.0);
    CHECK(m.num_triangles() >= 2);
    CHECK(std::abs(m.total_area() - 1.0) <= 1e-12);
    CHECK(audit(m).ok());
    CHECK(m.boundary_edges.front().vertices[0] == 0);
}

TEST_CASE("default triangulation quality")
{
    for (const auto & q : {unit_square, trapezoid(2.0), trapezoid(1.1), parallelogram(1.0, 1.5)}) {
        const auto m = triangulate(q);
        CHECK(std::abs(m.total_area() - q.area()) <= 1e-12 * q.area());
        CHECK(audit(m).ok());
        CHECK(m.min_angle() >= 20.0 * std::numbers::pi / 180.0 - 1e-9);
        for (std::size_t t = 0; t < m.num_triangles(); ++t) {
            CHECK(m.triangle_area(t) <= q.area() / 64 * (1 + 1e-12));
        }
    }
}

TEST_CASE("trapezoid area is preserved at any resolution")
{
    for (const double a : {10.0, 0.1, 0.003}) {
        const auto m = triangulate(trapezoid(2.0), a);
        CHECK(std::abs(m.total_area() - 1.5) <= 1e-12);
        CHECK(audit(m).ok());
    }
}

TEST_CASE("circular polygon keeps its boundary segments")
{
    const auto q = discretize_circular_quad(0.3, 0.4, 16);
    const auto m = triangulate(q);
    CHECK(m.boundary_edges.size() == 64);
    CHECK(audit(m).ok());
    CHECK(std::abs(m.total_area() - q.area()) <= 1e-12);
}

TEST_CASE("boundary labels follow the arcs")
{
    const auto q = trapezoid(1.5);
    const auto m = triangulate(q, 0.01);
    int changes = 0;
    for (std::size_t i = 0; i < m.boundary_edges.size(); ++i) {
        const auto & e = m.boundary_edges[i];
        const auto & next = m.boundary_edges[(i + 1) % m.boundary_edges.size()];
        CHECK(e.vertices[1] == next.vertices[0]);
        if (e.arc != next.arc) ++changes;
    }
    CHECK(changes == 4);
    CHECK(m.boundary_edges.front().arc == Arc::gamma1);
}

TEST_CASE("invalid area bound")
{
    CHECK_THROWS_AS(triangulate(unit_square, 0.0), MeshError);
    CHECK_THROWS_AS(triangulate(unit_square, NAN), MeshError);
}

TEST_CASE("bisect with nothing marked is the identity")
{
    const auto m = triangulate(trapezoid(1.5));
    const auto r = bisect(m, {});
    CHECK(r.vertices == m.vertices);
    CHECK(r.triangles == m.triangles);
}

TEST_CASE("bisect everything")
{
    const auto m = triangulate(trapezoid(1.5));
    const auto marked = all_triangles(m);
    const auto r = bisect(m, marked);
    CHECK(r.num_triangles() >= 2 * m.num_triangles());
    CHECK(std::abs(r.total_area() - m.total_area()) <= 1e-12);
    CHECK(audit(r).ok());
}

TEST_CASE("closure removes hanging nodes")
{
    const auto m = two_triangle_square();
    REQUIRE(audit(m).ok());
    const Index one[] = {0};
    const auto r = bisect(m, one);
    CHECK(audit(r).ok());
    CHECK(r.num_triangles() == 4);
    CHECK(r.num_vertices() == 5);

    // Marking a triangle whose refinement edge is on the boundary forces its
    // neighbor to be split too.
    TriMesh skew = m;
    skew.refinement_edge = {1, 0};
    const auto s = bisect(skew, one);
    CHECK(audit(s).ok());
    CHECK(s.num_vertices() >= 6);
}

TEST_CASE("repeated bisection keeps the mesh conforming and angles bounded")
{
    TriMesh m = triangulate(parallelogram(0.8, 1.3));
    const double initial = m.min_angle();
    const double area = m.total_area();
    for (int step = 0; step < 10; ++step) {
        // Refine around one corner, the way an indicator concentrated there would.
        std::vector<Index> marked;
        for (Index t = 0; t < m.num_triangles(); ++t) {
            const auto & tri = m.triangles[t];
            for (Index v : tri) {
                if (norm(m.vertices[v]) < 0.3) {
                    marked.push_back(t);
                    break;
                }
            }
        }
        m = bisect(m, marked);
        REQUIRE(audit(m).ok());
        CHECK(std::abs(m.total_area() - area) <= 1e-12);
    }
    // Newest-vertex bisection produces finitely many similarity classes.
    CHECK(m.min_angle() >= initial / 4);
}

TEST_CASE("prolongation interpolates linear fields exactly")
{
    const auto m = triangulate(trapezoid(1.7));
    std::vector<double> u(m.num_vertices());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = 2 * m.vertices[i].x - 3 * m.vertices[i].y + 1;
    const std::vector<Index> marked = {0, 3, 5};
    const auto r = bisect_with_history(m, marked);
    const auto fine = prolongate(r, u);
    REQUIRE(fine.size() == r.mesh.num_vertices());
    for (std::size_t i = 0; i < fine.size(); ++i) {
        CHECK(fine[i] == doctest::Approx(2 * r.mesh.vertices[i].x - 3 * r.mesh.vertices[i].y + 1));
    }
}

TEST_CASE("audit reports broken meshes")
{
    auto m = two_triangle_square();
    m.triangles[1] = {0, 3, 2};  // clockwise
    CHECK_FALSE(audit(m).ok());

    auto hanging = two_triangle_square();
    hanging.vertices.push_back({0.5, 0.5});
    hanging.triangles = {{0, 1, 4}, {1, 2, 4}, {0, 2, 3}};
    CHECK_FALSE(audit(hanging).ok());

    auto labels = two_triangle_square();
    labels.boundary_edges[2].arc = Arc::gamma2;
    CHECK_FALSE(audit(labels).ok());
}

TEST_CASE("mesh dump format")
{
    const auto m = two_triangle_square();
    std::ostringstream out;
    write_mesh(out, m);
    std::istringstream in(out.str());
    std::size_t nv = 0, nt = 0;
    in >> nv >> nt;
    CHECK(nv == 4);
    CHECK(nt == 2);
    CHECK(out.str().find("\n4\n") != std::string::npos);
}
