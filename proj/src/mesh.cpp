#include <qmod/mesh.hpp>
#include <qmod/errors.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <unordered_map>

namespace qmod {

namespace {

std::uint64_t edge_key(Index a, Index b)
{
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Local edge e of a triangle is the one opposite vertex e.
std::uint64_t local_edge_key(const Triangle & t, int e)
{
    return edge_key(t[static_cast<std::size_t>((e + 1) % 3)], t[static_cast<std::size_t>((e + 2) % 3)]);
}

constexpr Index unassigned = static_cast<Index>(-1);

} // namespace

double TriMesh::triangle_area(std::size_t t) const
{
    const auto & v = triangles[t];
    return 0.5 * orient2d(vertices[v[0]], vertices[v[1]], vertices[v[2]]);
}

double TriMesh::total_area() const
{
    double sum = 0.0;
    for (std::size_t t = 0; t < triangles.size(); ++t) sum += triangle_area(t);
    return sum;
}

double TriMesh::min_angle(std::size_t t) const
{
    const auto & v = triangles[t];
    double result = 4.0;
    for (int i = 0; i < 3; ++i) {
        const Point p = vertices[v[static_cast<std::size_t>(i)]];
        const Point a = vertices[v[static_cast<std::size_t>((i + 1) % 3)]] - p;
        const Point b = vertices[v[static_cast<std::size_t>((i + 2) % 3)]] - p;
        result = std::min(result, std::atan2(std::abs(cross(a, b)), dot(a, b)));
    }
    return result;
}

double TriMesh::min_angle() const
{
    double result = 4.0;
    for (std::size_t t = 0; t < triangles.size(); ++t) result = std::min(result, min_angle(t));
    return result;
}

Refinement bisect_with_history(const TriMesh & m, std::span<const Index> marked)
{
    const std::size_t nt = m.triangles.size();

    // Edge -> adjacent triangles.
    std::unordered_map<std::uint64_t, std::array<Index, 2>> adjacency;
    adjacency.reserve(nt * 2);
    for (std::size_t t = 0; t < nt; ++t) {
        for (int e = 0; e < 3; ++e) {
            auto [it, inserted] = adjacency.try_emplace(local_edge_key(m.triangles[t], e),
                                                        std::array<Index, 2>{static_cast<Index>(t), unassigned});
            if (!inserted) it->second[1] = static_cast<Index>(t);
        }
    }

    // Closure: a triangle with any edge to be split must also split its refinement edge.
    std::unordered_map<std::uint64_t, Index> split;
    std::vector<std::uint64_t> work;
    auto mark_edge = [&](std::uint64_t key) {
        if (split.try_emplace(key, unassigned).second) work.push_back(key);
    };
    for (Index t : marked) {
        if (t >= nt) {
            throw MeshError("marked triangle index out of range");
        }
        mark_edge(local_edge_key(m.triangles[t], m.refinement_edge[t]));
    }
    while (!work.empty()) {
        const std::uint64_t key = work.back();
        work.pop_back();
        for (Index t : adjacency.at(key)) {
            if (t == unassigned) continue;
            mark_edge(local_edge_key(m.triangles[t], m.refinement_edge[t]));
        }
    }

    Refinement out;
    TriMesh & r = out.mesh;
    r.vertices = m.vertices;

    // Number midpoints in triangle order so the result is deterministic.
    for (std::size_t t = 0; t < nt; ++t) {
        for (int e = 0; e < 3; ++e) {
            const auto it = split.find(local_edge_key(m.triangles[t], e));
            if (it == split.end() || it->second != unassigned) continue;
            const Index a = m.triangles[t][static_cast<std::size_t>((e + 1) % 3)];
            const Index b = m.triangles[t][static_cast<std::size_t>((e + 2) % 3)];
            it->second = static_cast<Index>(r.vertices.size());
            r.vertices.push_back(0.5 * (m.vertices[a] + m.vertices[b]));
            out.new_vertex_parents.push_back({std::min(a, b), std::max(a, b)});
        }
    }

    r.triangles.reserve(nt + 2 * split.size());
    r.refinement_edge.reserve(nt + 2 * split.size());

    // Triangle (newest, b, c) with refinement edge (b, c).
    auto emit = [&](auto && self, Index a, Index b, Index c) -> void {
        const auto it = split.find(edge_key(b, c));
        if (it == split.end()) {
            r.triangles.push_back({a, b, c});
            r.refinement_edge.push_back(0);
            return;
        }
        const Index mid = it->second;
        self(self, mid, a, b);
        self(self, mid, c, a);
    };

    for (std::size_t t = 0; t < nt; ++t) {
        const auto & tri = m.triangles[t];
        const int e = m.refinement_edge[t];
        const Index a = tri[static_cast<std::size_t>(e)];
        const Index b = tri[static_cast<std::size_t>((e + 1) % 3)];
        const Index c = tri[static_cast<std::size_t>((e + 2) % 3)];
        if (split.find(edge_key(b, c)) == split.end()) {
            r.triangles.push_back(tri);
            r.refinement_edge.push_back(static_cast<std::uint8_t>(e));
        } else {
            emit(emit, a, b, c);
        }
    }

    r.boundary_edges.reserve(m.boundary_edges.size() + split.size());
    for (const auto & be : m.boundary_edges) {
        const auto it = split.find(edge_key(be.vertices[0], be.vertices[1]));
        if (it == split.end()) {
            r.boundary_edges.push_back(be);
        } else {
            r.boundary_edges.push_back({{be.vertices[0], it->second}, be.arc});
            r.boundary_edges.push_back({{it->second, be.vertices[1]}, be.arc});
        }
    }
    return out;
}

TriMesh bisect(const TriMesh & m, std::span<const Index> marked)
{
    return bisect_with_history(m, marked).mesh;
}

std::vector<double> prolongate(const Refinement & r, std::span<const double> coarse)
{
    const std::size_t n_old = r.mesh.vertices.size() - r.new_vertex_parents.size();
    if (coarse.size() != n_old) {
        throw MeshError("prolongate: coarse vector does not match the parent mesh");
    }
    std::vector<double> fine(coarse.begin(), coarse.end());
    fine.reserve(r.mesh.vertices.size());
    for (const auto & [a, b] : r.new_vertex_parents) {
        fine.push_back(0.5 * (coarse[a] + coarse[b]));
    }
    return fine;
}

MeshAudit audit(const TriMesh & m)
{
    MeshAudit result;
    auto problem = [&](std::string s) {
        if (result.problems.size() < 20) result.problems.push_back(std::move(s));
    };

    const std::size_t nv = m.vertices.size();
    if (m.refinement_edge.size() != m.triangles.size()) {
        problem("refinement_edge size differs from triangle count");
    }

    // Directed edge -> count; an interior edge appears once in each direction.
    std::map<std::pair<Index, Index>, int> directed;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto & v = m.triangles[t];
        if (v[0] >= nv || v[1] >= nv || v[2] >= nv) {
            problem("triangle " + std::to_string(t) + " references a missing vertex");
            continue;
        }
        if (!(m.triangle_area(t) > 0.0)) {
            problem("triangle " + std::to_string(t) + " is not positively oriented");
        }
        if (t < m.refinement_edge.size() && m.refinement_edge[t] > 2) {
            problem("triangle " + std::to_string(t) + " has an invalid refinement edge");
        }
        for (int i = 0; i < 3; ++i) {
            ++directed[{v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>((i + 1) % 3)]}];
        }
    }

    std::map<std::pair<Index, Index>, Arc> boundary;
    for (const auto & be : m.boundary_edges) {
        if (!boundary.emplace(std::pair{be.vertices[0], be.vertices[1]}, be.arc).second) {
            problem("duplicate boundary edge");
        }
    }

    for (const auto & [edge, count] : directed) {
        if (count > 1) {
            problem("directed edge used by more than one triangle");
            continue;
        }
        const bool has_twin = directed.count({edge.second, edge.first}) > 0;
        const bool is_boundary = boundary.count(edge) > 0;
        if (!has_twin && !is_boundary) {
            problem("edge (" + std::to_string(edge.first) + ", " + std::to_string(edge.second)
                    + ") has one triangle but is not a boundary edge (hanging node?)");
        }
        if (has_twin && is_boundary) {
            problem("interior edge listed as boundary");
        }
    }
    for (const auto & [edge, arc] : boundary) {
        if (directed.count(edge) == 0) problem("boundary edge not present in any triangle");
    }

    // Single loop with labels cycling gamma1 -> gamma2 -> gamma3 -> gamma4.
    if (!m.boundary_edges.empty()) {
        std::map<Index, std::pair<Index, Arc>> next;
        for (const auto & be : m.boundary_edges) next[be.vertices[0]] = {be.vertices[1], be.arc};
        if (next.size() != m.boundary_edges.size()) {
            problem("boundary vertex with two outgoing boundary edges");
        } else {
            const Index start = m.boundary_edges.front().vertices[0];
            Index v = start;
            std::size_t steps = 0;
            int changes = 0;
            Arc prev = m.boundary_edges.back().arc;
            do {
                const auto it = next.find(v);
                if (it == next.end()) {
                    problem("boundary loop is open");
                    break;
                }
                const Arc arc = it->second.second;
                if (arc != prev) {
                    ++changes;
                    if (static_cast<int>(arc) != (static_cast<int>(prev) + 1) % 4) {
                        problem("arc labels out of cyclic order");
                    }
                }
                prev = arc;
                v = it->second.first;
                ++steps;
            } while (v != start && steps <= m.boundary_edges.size());
            if (steps != m.boundary_edges.size()) problem("boundary is not a single loop");
            if (changes != 4) problem("arc labels change " + std::to_string(changes) + " times, expected 4");
        }
    }
    return result;
}

void write_mesh(std::ostream & out, const TriMesh & m)
{
    out << m.vertices.size() << ' ' << m.triangles.size() << '\n' << std::setprecision(17);
    for (const auto & p : m.vertices) out << p.x << ' ' << p.y << '\n';
    for (const auto & t : m.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << m.boundary_edges.size() << '\n';
    for (const auto & be : m.boundary_edges) {
        out << be.vertices[0] << ' ' << be.vertices[1] << ' ' << static_cast<int>(be.arc) + 1 << '\n';
    }
}

} // namespace qmod
