// Initial triangulation of a polygonal quadrilateral: ear clipping, Lawson
// flips towards the constrained Delaunay triangulation, then midpoint splits
// of longest edges until the size and angle targets are met.

#include <qmod/mesh.hpp>
#include <qmod/errors.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <unordered_map>

namespace qmod {

namespace {

constexpr int none = -1;

std::uint64_t edge_key(Index a, Index b)
{
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

double incircle(Point a, Point b, Point c, Point d)
{
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double ad = adx * adx + ady * ady;
    const double bd = bdx * bdx + bdy * bdy;
    const double cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

double triangle_min_angle(Point a, Point b, Point c)
{
    auto angle = [](Point p, Point q, Point r) {
        const Point u = q - p;
        const Point v = r - p;
        return std::atan2(std::abs(cross(u, v)), dot(u, v));
    };
    return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

class Triangulator
{
public:
    Triangulator(const PolygonQuad & q, const TriangulationOptions & opt)
        : _q(q), _opt(opt), _pts(q.vertices())
    {
        const std::size_t m = _pts.size();
        for (std::size_t i = 0; i < m; ++i) {
            _labels[edge_key(static_cast<Index>(i), static_cast<Index>((i + 1) % m))] = q.edge_arc(i);
        }
    }

    TriMesh run()
    {
        ear_clip();
        build_neighbors();
        lawson();
        refine();
        return finish();
    }

private:
    const PolygonQuad & _q;
    TriangulationOptions _opt;
    std::vector<Point> _pts;
    std::vector<Triangle> _tris;
    std::vector<std::array<int, 3>> _nbr;
    std::unordered_map<std::uint64_t, Arc> _labels;

    void ear_clip()
    {
        const std::size_t m = _pts.size();
        std::vector<Index> ring(m);
        for (std::size_t i = 0; i < m; ++i) ring[i] = static_cast<Index>(i);

        auto is_ear = [&](std::size_t k) {
            const std::size_t n = ring.size();
            const Index ia = ring[(k + n - 1) % n], ib = ring[k], ic = ring[(k + 1) % n];
            const Point a = _pts[ia], b = _pts[ib], c = _pts[ic];
            if (!(orient2d(a, b, c) > 0.0)) return false;
            for (Index v : ring) {
                if (v == ia || v == ib || v == ic) continue;
                const Point p = _pts[v];
                if (orient2d(a, b, p) >= 0.0 && orient2d(b, c, p) >= 0.0 && orient2d(c, a, p) >= 0.0) {
                    return false;
                }
            }
            return true;
        };

        std::size_t k = 0;
        std::size_t misses = 0;
        while (ring.size() > 3) {
            if (misses > ring.size()) {
                throw MeshError("ear clipping failed: polygon is degenerate");
            }
            k %= ring.size();
            if (is_ear(k)) {
                const std::size_t n = ring.size();
                _tris.push_back({ring[(k + n - 1) % n], ring[k], ring[(k + 1) % n]});
                ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(k));
                misses = 0;
            } else {
                ++k;
                ++misses;
            }
        }
        if (!(orient2d(_pts[ring[0]], _pts[ring[1]], _pts[ring[2]]) > 0.0)) {
            throw MeshError("ear clipping failed: degenerate final triangle");
        }
        _tris.push_back({ring[0], ring[1], ring[2]});
    }

    void build_neighbors()
    {
        _nbr.assign(_tris.size(), {none, none, none});
        std::unordered_map<std::uint64_t, std::pair<int, int>> seen;
        seen.reserve(_tris.size() * 3);
        for (std::size_t t = 0; t < _tris.size(); ++t) {
            for (int i = 0; i < 3; ++i) {
                const Index a = _tris[t][(i + 1) % 3], b = _tris[t][(i + 2) % 3];
                auto [it, inserted] = seen.try_emplace(edge_key(a, b), static_cast<int>(t), i);
                if (!inserted) {
                    const auto [u, j] = it->second;
                    _nbr[t][i] = u;
                    _nbr[static_cast<std::size_t>(u)][j] = static_cast<int>(t);
                }
            }
        }
    }

    int local_of(std::size_t t, int neighbor) const
    {
        for (int i = 0; i < 3; ++i) {
            if (_nbr[t][i] == neighbor) return i;
        }
        return none;
    }

    // Flip the edge opposite local vertex i of t if it is not locally Delaunay.
    bool maybe_flip(std::size_t t, int i)
    {
        const int u = _nbr[t][i];
        if (u == none) return false;
        const auto uu = static_cast<std::size_t>(u);
        const int j = local_of(uu, static_cast<int>(t));

        const Index a = _tris[t][i], b = _tris[t][(i + 1) % 3], c = _tris[t][(i + 2) % 3];
        const Index d = _tris[uu][j];
        const Point pa = _pts[a], pb = _pts[b], pc = _pts[c], pd = _pts[d];

        const double scale = std::max({norm(pb - pa), norm(pc - pa), norm(pd - pa)});
        if (!(incircle(pa, pb, pc, pd) > 1e-12 * scale * scale * scale * scale)) return false;
        if (!(orient2d(pa, pb, pd) > 0.0 && orient2d(pa, pd, pc) > 0.0)) return false;

        const int n_ab = _nbr[t][(i + 2) % 3];
        const int n_ca = _nbr[t][(i + 1) % 3];
        // u = (d, c, b) up to rotation.
        const int n_bd = _nbr[uu][(j + 1) % 3];
        const int n_dc = _nbr[uu][(j + 2) % 3];

        _tris[t] = {a, b, d};
        _nbr[t] = {n_bd, u, n_ab};
        _tris[uu] = {a, d, c};
        _nbr[uu] = {n_dc, n_ca, static_cast<int>(t)};

        if (n_bd != none) relink(static_cast<std::size_t>(n_bd), u, static_cast<int>(t));
        if (n_ca != none) relink(static_cast<std::size_t>(n_ca), static_cast<int>(t), u);
        return true;
    }

    void relink(std::size_t t, int from, int to)
    {
        for (int i = 0; i < 3; ++i) {
            if (_nbr[t][i] == from) {
                _nbr[t][i] = to;
                return;
            }
        }
    }

    void lawson()
    {
        for (int sweep = 0; sweep < 1000; ++sweep) {
            bool flipped = false;
            for (std::size_t t = 0; t < _tris.size(); ++t) {
                for (int i = 0; i < 3; ++i) {
                    flipped |= maybe_flip(t, i);
                }
            }
            if (!flipped) return;
        }
    }

    // Split the edge opposite local vertex i of t at point x (on that edge).
    // Returns the new vertex index; the four (or two) triangles around it are
    // legalized afterwards.
    Index split_edge(std::size_t t, int i, Point x)
    {
        const Index a = _tris[t][i], p = _tris[t][(i + 1) % 3], q = _tris[t][(i + 2) % 3];
        const auto mid = static_cast<Index>(_pts.size());
        _pts.push_back(x);

        const int u = _nbr[t][i];
        const int n_t_opp_p = _nbr[t][(i + 1) % 3];  // across (q, a)
        const int n_t_opp_q = _nbr[t][(i + 2) % 3];  // across (a, p)

        const auto t2 = static_cast<int>(_tris.size());
        const int u2 = (u == none) ? none : t2 + 1;

        _tris[t] = {a, p, mid};
        _nbr[t] = {u2, t2, n_t_opp_q};
        _tris.push_back({a, mid, q});
        _nbr.push_back({u, n_t_opp_p, static_cast<int>(t)});
        if (n_t_opp_p != none) relink(static_cast<std::size_t>(n_t_opp_p), static_cast<int>(t), t2);

        if (u == none) {
            const Arc arc = _labels.at(edge_key(p, q));
            _labels.erase(edge_key(p, q));
            _labels[edge_key(p, mid)] = arc;
            _labels[edge_key(mid, q)] = arc;
        } else {
            const auto uu = static_cast<std::size_t>(u);
            const int j = local_of(uu, static_cast<int>(t));
            const Index w = _tris[uu][j];
            // u = (w, q, p) up to rotation.
            const int n_u_opp_q = _nbr[uu][(j + 1) % 3];  // across (p, w)
            const int n_u_opp_p = _nbr[uu][(j + 2) % 3];  // across (w, q)

            _tris[uu] = {w, q, mid};
            _nbr[uu] = {t2, u2, n_u_opp_p};
            _tris.push_back({w, mid, p});
            _nbr.push_back({static_cast<int>(t), n_u_opp_q, u});
            if (n_u_opp_q != none) relink(static_cast<std::size_t>(n_u_opp_q), u, u2);
        }
        legalize_around(mid);
        return mid;
    }

    // Insert x strictly inside triangle t.
    Index insert_in_triangle(std::size_t t, Point x)
    {
        const Index a = _tris[t][0], b = _tris[t][1], c = _tris[t][2];
        const int n_a = _nbr[t][0], n_b = _nbr[t][1], n_c = _nbr[t][2];
        const auto p = static_cast<Index>(_pts.size());
        _pts.push_back(x);

        const auto t1 = static_cast<int>(_tris.size());
        const int t2 = t1 + 1;
        _tris[t] = {p, b, c};
        _nbr[t] = {n_a, t1, t2};
        _tris.push_back({p, c, a});
        _nbr.push_back({n_b, t2, static_cast<int>(t)});
        _tris.push_back({p, a, b});
        _nbr.push_back({n_c, static_cast<int>(t), t1});
        if (n_b != none) relink(static_cast<std::size_t>(n_b), static_cast<int>(t), t1);
        if (n_c != none) relink(static_cast<std::size_t>(n_c), static_cast<int>(t), t2);
        legalize_around(p);
        return p;
    }

    // Restore the Delaunay property on edges opposite the new vertex v.
    void legalize_around(Index v)
    {
        std::vector<std::size_t> stack;
        collect_star(v, stack);
        while (!stack.empty()) {
            const std::size_t t = stack.back();
            stack.pop_back();
            int i = 0;
            while (i < 3 && _tris[t][i] != v) ++i;
            if (i == 3) continue;
            const int u = _nbr[t][i];
            if (maybe_flip(t, i)) {
                stack.push_back(t);
                stack.push_back(static_cast<std::size_t>(u));
            }
        }
    }

    // Triangles incident to the most recently created vertex v: they are the
    // last few appended plus the ones rewritten in place, so scan the star by
    // walking neighbors starting from any triangle that contains v.
    void collect_star(Index v, std::vector<std::size_t> & out) const
    {
        std::size_t start = _tris.size();
        for (std::size_t t = _tris.size(); t-- > 0;) {
            if (_tris[t][0] == v || _tris[t][1] == v || _tris[t][2] == v) {
                start = t;
                break;
            }
        }
        if (start == _tris.size()) return;
        // Rotate around v in both directions.
        std::vector<std::size_t> seen{start};
        for (int dir = 1; dir <= 2; ++dir) {
            std::size_t t = start;
            for (int guard = 0; guard < 64; ++guard) {
                int i = 0;
                while (_tris[t][i] != v) ++i;
                const int n = _nbr[t][(i + dir) % 3];
                if (n == none || static_cast<std::size_t>(n) == start) break;
                t = static_cast<std::size_t>(n);
                if (std::find(seen.begin(), seen.end(), t) != seen.end()) break;
                seen.push_back(t);
            }
        }
        out.insert(out.end(), seen.begin(), seen.end());
    }

    int longest_edge(std::size_t t) const
    {
        int best = 0;
        double best_len = -1.0;
        for (int i = 0; i < 3; ++i) {
            const double len = edge_length(t, i);
            if (len > best_len) {
                best_len = len;
                best = i;
            }
        }
        return best;
    }

    double shortest_edge(std::size_t t) const
    {
        return std::min({edge_length(t, 0), edge_length(t, 1), edge_length(t, 2)});
    }

    double area(std::size_t t) const
    {
        return 0.5 * orient2d(_pts[_tris[t][0]], _pts[_tris[t][1]], _pts[_tris[t][2]]);
    }

    double edge_length(std::size_t t, int i) const
    {
        return norm(_pts[_tris[t][(i + 2) % 3]] - _pts[_tris[t][(i + 1) % 3]]);
    }

    Point circumcenter(std::size_t t) const
    {
        const Point a = _pts[_tris[t][0]];
        const Point b = _pts[_tris[t][1]] - a;
        const Point c = _pts[_tris[t][2]] - a;
        const double d = 2.0 * cross(b, c);
        const double b2 = dot(b, b), c2 = dot(c, c);
        return {a.x + (c.y * b2 - b.y * c2) / d, a.y + (b.x * c2 - c.x * b2) / d};
    }

    // A boundary segment (t, i) is encroached by x when x lies strictly inside
    // its diametral circle.
    bool encroaches(Point x, Index p, Index q) const
    {
        const Point a = _pts[p], b = _pts[q];
        return dot(a - x, b - x) < 0.0;
    }

    bool segment_encroached(std::size_t t, int i) const
    {
        return encroaches(_pts[_tris[t][i]], _tris[t][(i + 1) % 3], _tris[t][(i + 2) % 3]);
    }

    struct Location
    {
        std::size_t tri;
        int edge;   ///< -1: strictly inside; otherwise the edge x lies on or the boundary edge crossed
        bool crossed_boundary;
    };

    // Visibility walk from `start` towards x.
    Location locate(std::size_t start, Point x) const
    {
        std::size_t t = start;
        for (std::size_t guard = 0; guard < 4 * _tris.size() + 16; ++guard) {
            int exit_edge = none;
            int on_edge = none;
            for (int i = 0; i < 3; ++i) {
                const double o = orient2d(_pts[_tris[t][(i + 1) % 3]], _pts[_tris[t][(i + 2) % 3]], x);
                if (o < 0.0) {
                    exit_edge = i;
                    break;
                }
                if (o == 0.0) on_edge = i;
            }
            if (exit_edge == none) return {t, on_edge, false};
            const int n = _nbr[t][exit_edge];
            if (n == none) return {t, exit_edge, true};
            t = static_cast<std::size_t>(n);
        }
        throw MeshError("point location did not terminate");
    }

    std::vector<std::pair<std::size_t, int>> boundary_slots() const
    {
        std::vector<std::pair<std::size_t, int>> out;
        for (std::size_t t = 0; t < _tris.size(); ++t) {
            for (int i = 0; i < 3; ++i) {
                if (_nbr[t][i] == none) out.emplace_back(t, i);
            }
        }
        return out;
    }

    void split_segment(std::size_t t, int i)
    {
        const Point p = _pts[_tris[t][(i + 1) % 3]];
        const Point q = _pts[_tris[t][(i + 2) % 3]];
        split_edge(t, i, 0.5 * (p + q));
    }

    bool split_encroached_segments()
    {
        bool any = false;
        for (int round = 0; round < 64; ++round) {
            bool split = false;
            for (const auto & [t, i] : boundary_slots()) {
                if (_pts.size() >= _opt.max_vertices) return any;
                if (_nbr[t][i] != none) continue;
                if (edge_length(t, i) <= _floor_len) continue;
                if (segment_encroached(t, i)) {
                    split_segment(t, i);
                    split = any = true;
                }
            }
            if (!split) break;
        }
        return any;
    }

    double _floor_len = 0.0;

    bool in_circumcircle(std::size_t t, Point x) const
    {
        const Point a = _pts[_tris[t][0]], b = _pts[_tris[t][1]], c = _pts[_tris[t][2]];
        return incircle(a, b, c, x) > 0.0;
    }

    std::optional<std::pair<std::size_t, int>> encroached_by_insertion(std::size_t start, Point x) const
    {
        std::vector<std::size_t> cavity{start};
        for (std::size_t k = 0; k < cavity.size() && cavity.size() < 4096; ++k) {
            const std::size_t t = cavity[k];
            for (int i = 0; i < 3; ++i) {
                const int n = _nbr[t][i];
                if (n == none) {
                    if (encroaches(x, _tris[t][(i + 1) % 3], _tris[t][(i + 2) % 3])) {
                        return std::pair{t, i};
                    }
                    continue;
                }
                const auto nn = static_cast<std::size_t>(n);
                if (std::find(cavity.begin(), cavity.end(), nn) == cavity.end() && in_circumcircle(nn, x)) {
                    cavity.push_back(nn);
                }
            }
        }
        return std::nullopt;
    }

    void refine()
    {
        const double poly_area = _q.area();
        const double max_area = _opt.max_area > 0.0 ? _opt.max_area : poly_area / 64.0;
        const double min_angle = _opt.min_angle_degrees * std::numbers::pi / 180.0;
        // Angle-driven insertions stop at this edge length so that small input
        // angles cannot trigger unbounded refinement.
        _floor_len = 1e-3 * std::sqrt(poly_area);

        auto bad = [&](std::size_t t) {
            if (area(t) > max_area) return true;
            const Triangle & v = _tris[t];
            if (triangle_min_angle(_pts[v[0]], _pts[v[1]], _pts[v[2]]) >= min_angle) return false;
            return shortest_edge(t) > _floor_len;
        };

        split_encroached_segments();
        for (int pass = 0; pass < 1000; ++pass) {
            bool changed = false;
            const std::size_t count = _tris.size();
            for (std::size_t t = 0; t < count && _pts.size() < _opt.max_vertices; ++t) {
                if (!bad(t)) continue;
                const Point c = circumcenter(t);
                const Location loc = locate(t, c);
                if (loc.crossed_boundary) {
                    split_segment(loc.tri, loc.edge);
                    changed = true;
                    continue;
                }
                // Segments on the insertion cavity whose diametral circle
                // contains c are split instead.
                if (const auto seg = encroached_by_insertion(loc.tri, c)) {
                    split_segment(seg->first, seg->second);
                    changed = true;
                    continue;
                }
                if (loc.edge == none) {
                    insert_in_triangle(loc.tri, c);
                } else {
                    split_edge(loc.tri, loc.edge, c);
                }
                changed = true;
            }
            changed |= split_encroached_segments();
            if (!changed || _pts.size() >= _opt.max_vertices) break;
        }
    }

    TriMesh finish()
    {
        TriMesh mesh;
        mesh.vertices = _pts;
        mesh.triangles = _tris;

        // Boundary edges in loop order starting from corner z1.
        std::unordered_map<Index, BoundaryEdge> next_of;
        for (std::size_t t = 0; t < _tris.size(); ++t) {
            for (int i = 0; i < 3; ++i) {
                if (_nbr[t][i] != none) continue;
                const Index p = _tris[t][(i + 1) % 3], q = _tris[t][(i + 2) % 3];
                const auto it = _labels.find(edge_key(p, q));
                if (it == _labels.end()) {
                    throw MeshError("boundary edge without arc label");
                }
                next_of[p] = BoundaryEdge{{p, q}, it->second};
            }
        }
        const auto start = static_cast<Index>(_q.corners()[0]);
        Index v = start;
        do {
            const auto it = next_of.find(v);
            if (it == next_of.end() || mesh.boundary_edges.size() > next_of.size()) {
                throw MeshError("boundary of the triangulation is not a single loop");
            }
            mesh.boundary_edges.push_back(it->second);
            v = it->second.vertices[1];
        } while (v != start);
        if (mesh.boundary_edges.size() != next_of.size()) {
            throw MeshError("boundary of the triangulation is not a single loop");
        }

        mesh.refinement_edge.resize(_tris.size());
        for (std::size_t t = 0; t < _tris.size(); ++t) {
            mesh.refinement_edge[t] = static_cast<std::uint8_t>(longest_edge(t));
        }
        return mesh;
    }
};

} // namespace

TriMesh triangulate(const PolygonQuad & q, const TriangulationOptions & options)
{
    return Triangulator(q, options).run();
}

TriMesh triangulate(const PolygonQuad & q, double max_area)
{
    if (!(max_area > 0.0)) {
        throw MeshError("max_area must be positive");
    }
    TriangulationOptions options;
    options.max_area = max_area;
    return triangulate(q, options);
}

} // namespace qmod
