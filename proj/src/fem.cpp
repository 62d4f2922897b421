#include <qmod/fem.hpp>
#include <qmod/errors.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace qmod::fem {

namespace {

std::uint64_t edge_key(Index a, Index b)
{
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::optional<double> dirichlet_value(Arc arc, Problem problem)
{
    if (problem == Problem::primal) {
        if (arc == Arc::gamma2) return 0.0;
        if (arc == Arc::gamma4) return 1.0;
    } else {
        if (arc == Arc::gamma3) return 0.0;
        if (arc == Arc::gamma1) return 1.0;
    }
    return std::nullopt;
}

} // namespace

void SparseSystem::multiply(std::span<const double> x, std::span<double> y) const
{
    for (std::size_t i = 0; i < dimension; ++i) {
        double s = 0.0;
        for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
            s += values[k] * x[column_indices[k]];
        }
        y[i] = s;
    }
}

double SparseSystem::entry(std::size_t row, std::size_t col) const
{
    for (std::size_t k = row_offsets[row]; k < row_offsets[row + 1]; ++k) {
        if (column_indices[k] == col) return values[k];
    }
    return 0.0;
}

std::size_t SparseSystem::free_dofs() const
{
    return static_cast<std::size_t>(std::count(dirichlet.begin(), dirichlet.end(), std::nullopt));
}

std::array<std::array<double, 3>, 3> local_stiffness(Point a, Point b, Point c)
{
    const double area = 0.5 * orient2d(a, b, c);
    const std::array<Point, 3> e{c - b, a - c, b - a};
    std::array<std::array<double, 3>, 3> k{};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            k[i][j] = dot(e[i], e[j]) / (4.0 * area);
        }
    }
    return k;
}

Point p1_gradient(Point a, Point b, Point c, double ua, double ub, double uc)
{
    // grad lambda_i is the left normal of the opposite edge over twice the area.
    const double twice_area = orient2d(a, b, c);
    const Point e0 = c - b, e1 = a - c, e2 = b - a;
    const double gx = -(ua * e0.y + ub * e1.y + uc * e2.y);
    const double gy = ua * e0.x + ub * e1.x + uc * e2.x;
    return {gx / twice_area, gy / twice_area};
}

SparseSystem assemble_stiffness(const TriMesh & m)
{
    const std::size_t n = m.vertices.size();
    SparseSystem s;
    s.dimension = n;

    // Sparsity pattern: each row holds the vertices of its incident triangles.
    std::vector<std::size_t> incidence(n + 1, 0);
    for (const auto & t : m.triangles) {
        for (Index v : t) incidence[v + 1] += 3;
    }
    std::partial_sum(incidence.begin(), incidence.end(), incidence.begin());
    std::vector<Index> raw(incidence[n]);
    {
        std::vector<std::size_t> fill(incidence.begin(), incidence.end() - 1);
        for (const auto & t : m.triangles) {
            for (Index v : t) {
                for (Index w : t) raw[fill[v]++] = w;
            }
        }
    }
    s.row_offsets.assign(n + 1, 0);
    s.column_indices.reserve(raw.size() / 2);
    for (std::size_t i = 0; i < n; ++i) {
        auto first = raw.begin() + static_cast<std::ptrdiff_t>(incidence[i]);
        auto last = raw.begin() + static_cast<std::ptrdiff_t>(incidence[i + 1]);
        std::sort(first, last);
        last = std::unique(first, last);
        s.column_indices.insert(s.column_indices.end(), first, last);
        s.row_offsets[i + 1] = s.column_indices.size();
    }
    s.values.assign(s.column_indices.size(), 0.0);
    std::vector<int> edge_uses(s.column_indices.size(), 0);

    auto slot = [&](Index row, Index col) {
        const auto first = s.column_indices.begin() + static_cast<std::ptrdiff_t>(s.row_offsets[row]);
        const auto last = s.column_indices.begin() + static_cast<std::ptrdiff_t>(s.row_offsets[row + 1]);
        return static_cast<std::size_t>(std::lower_bound(first, last, col) - s.column_indices.begin());
    };

    for (const auto & t : m.triangles) {
        const auto k = local_stiffness(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                const std::size_t pos = slot(t[i], t[j]);
                s.values[pos] += k[i][j];
                if (i != j) ++edge_uses[pos];
            }
        }
    }

    // Every edge used by a single triangle must be a labelled boundary edge.
    std::size_t single_use = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = s.row_offsets[i]; k < s.row_offsets[i + 1]; ++k) {
            if (edge_uses[k] == 1) ++single_use;
        }
    }
    if (single_use != 2 * m.boundary_edges.size()) {
        throw AssemblyError("triangulation has boundary edges without an arc label");
    }

    s.dirichlet.assign(n, std::nullopt);
    s.rhs.assign(n, 0.0);
    for (const auto & be : m.boundary_edges) {
        if (be.vertices[0] >= n || be.vertices[1] >= n) {
            throw AssemblyError("boundary edge references a missing vertex");
        }
        const std::size_t pos = slot(be.vertices[0], be.vertices[1]);
        if (pos >= s.row_offsets[be.vertices[0] + 1] || s.column_indices[pos] != be.vertices[1]
            || edge_uses[pos] != 1) {
            throw AssemblyError("labelled boundary edge is not on the boundary of the triangulation");
        }
    }
    return s;
}

SparseSystem assemble(const TriMesh & m, Problem problem)
{
    SparseSystem s = assemble_stiffness(m);
    const std::size_t n = s.dimension;
    for (const auto & be : m.boundary_edges) {
        if (const auto g = dirichlet_value(be.arc, problem)) {
            s.dirichlet[be.vertices[0]] = *g;
            s.dirichlet[be.vertices[1]] = *g;
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (s.dirichlet[i]) {
            for (std::size_t k = s.row_offsets[i]; k < s.row_offsets[i + 1]; ++k) {
                s.values[k] = (s.column_indices[k] == i) ? 1.0 : 0.0;
            }
            s.rhs[i] = *s.dirichlet[i];
            continue;
        }
        for (std::size_t k = s.row_offsets[i]; k < s.row_offsets[i + 1]; ++k) {
            const auto & g = s.dirichlet[s.column_indices[k]];
            if (g) {
                s.rhs[i] -= s.values[k] * *g;
                s.values[k] = 0.0;
            }
        }
    }
    return s;
}

CgResult solve_cg(const SparseSystem & s, double rel_tol, std::span<const double> initial_guess)
{
    const std::size_t n = s.dimension;
    CgResult out;
    out.solution.assign(n, 0.0);
    if (!initial_guess.empty()) {
        if (initial_guess.size() != n) {
            throw SolverError("initial guess has the wrong length");
        }
        std::copy(initial_guess.begin(), initial_guess.end(), out.solution.begin());
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (s.dirichlet[i]) out.solution[i] = *s.dirichlet[i];
    }

    std::vector<double> inv_diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = s.entry(i, i);
        if (!(d > 0.0)) {
            throw SolverError("non-positive diagonal entry in row " + std::to_string(i));
        }
        inv_diag[i] = 1.0 / d;
    }

    auto & x = out.solution;
    std::vector<double> r(n), p(n), q(n);
    s.multiply(x, q);
    double b_sq = 0.0;
    double r_sq = 0.0;
    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = s.rhs[i] - q[i];
        p[i] = inv_diag[i] * r[i];
        b_sq += s.rhs[i] * s.rhs[i];
        r_sq += r[i] * r[i];
        rz += r[i] * p[i];
    }

    const double b_norm = std::sqrt(b_sq);
    if (b_norm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return out;
    }
    const double target_sq = rel_tol * rel_tol * b_sq;
    out.relative_residual = std::sqrt(r_sq) / b_norm;
    if (r_sq <= target_sq) return out;

    const auto cap = static_cast<std::size_t>(20.0 * std::sqrt(static_cast<double>(n)) + 1000.0);
    const std::size_t * offsets = s.row_offsets.data();
    const Index * cols = s.column_indices.data();
    const double * vals = s.values.data();

    for (std::size_t it = 1; it <= cap; ++it) {
        // q = A p and p.q in one sweep.
        double pq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) acc += vals[k] * p[cols[k]];
            q[i] = acc;
            pq += p[i] * acc;
        }
        if (!(pq > 0.0)) {
            throw SolverError("conjugate gradients broke down (matrix not positive definite?)");
        }
        const double alpha = rz / pq;
        double rz_next = 0.0;
        r_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            const double ri = r[i] - alpha * q[i];
            r[i] = ri;
            r_sq += ri * ri;
            rz_next += ri * ri * inv_diag[i];
        }
        out.iterations = it;
        out.relative_residual = std::sqrt(r_sq) / b_norm;
        if (r_sq <= target_sq) {
            // The recursive residual drifts from b - A x; confirm before stopping
            // and restart from the true residual otherwise.
            s.multiply(x, q);
            r_sq = 0.0;
            rz = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                r[i] = s.rhs[i] - q[i];
                p[i] = inv_diag[i] * r[i];
                r_sq += r[i] * r[i];
                rz += r[i] * p[i];
            }
            out.relative_residual = std::sqrt(r_sq) / b_norm;
            if (r_sq <= target_sq) return out;
            continue;
        }

        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = inv_diag[i] * r[i] + beta * p[i];
    }
    throw SolverError("conjugate gradients did not reach the tolerance within "
                      + std::to_string(cap) + " iterations");
}

double dirichlet_energy(const TriMesh & m, std::span<const double> u)
{
    double energy = 0.0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto & v = m.triangles[t];
        const Point g = p1_gradient(m.vertices[v[0]], m.vertices[v[1]], m.vertices[v[2]], u[v[0]], u[v[1]], u[v[2]]);
        energy += m.triangle_area(t) * dot(g, g);
    }
    return energy;
}

std::vector<double> error_indicator(const TriMesh & m, std::span<const double> u, Problem problem)
{
    const std::size_t nt = m.triangles.size();
    std::vector<Point> grad(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        const auto & v = m.triangles[t];
        grad[t] = p1_gradient(m.vertices[v[0]], m.vertices[v[1]], m.vertices[v[2]], u[v[0]], u[v[1]], u[v[2]]);
    }

    std::unordered_map<std::uint64_t, Arc> boundary;
    boundary.reserve(m.boundary_edges.size());
    for (const auto & be : m.boundary_edges) boundary.emplace(edge_key(be.vertices[0], be.vertices[1]), be.arc);

    std::unordered_map<std::uint64_t, Index> first_seen;
    first_seen.reserve(nt * 2);
    std::vector<double> eta(nt, 0.0);

    for (std::size_t t = 0; t < nt; ++t) {
        const auto & v = m.triangles[t];
        for (std::size_t i = 0; i < 3; ++i) {
            const Index a = v[(i + 1) % 3], b = v[(i + 2) % 3];
            const Point e = m.vertices[b] - m.vertices[a];
            const double len = norm(e);
            const Point normal{e.y / len, -e.x / len};  // outward for a counterclockwise triangle
            const std::uint64_t key = edge_key(a, b);

            if (const auto bit = boundary.find(key); bit != boundary.end()) {
                if (!dirichlet_value(bit->second, problem)) {
                    const double flux = dot(grad[t], normal);
                    eta[t] += len * len * flux * flux;
                }
                continue;
            }
            auto [it, inserted] = first_seen.try_emplace(key, static_cast<Index>(t));
            if (inserted) continue;
            const Index other = it->second;
            const double jump = dot(grad[t] - grad[other], normal);
            const double contribution = len * len * jump * jump;
            eta[t] += contribution;
            eta[other] += contribution;
        }
    }
    return eta;
}

std::vector<Index> dorfler_mark(std::span<const double> eta_squared, double fraction)
{
    std::vector<Index> order(eta_squared.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return eta_squared[a] > eta_squared[b]; });
    const double total = std::accumulate(eta_squared.begin(), eta_squared.end(), 0.0);
    const double goal = fraction * total;
    double acc = 0.0;
    std::size_t count = 0;
    while (count < order.size() && (acc < goal || count == 0)) {
        if (eta_squared[order[count]] <= 0.0) break;
        acc += eta_squared[order[count]];
        ++count;
    }
    order.resize(count);
    std::sort(order.begin(), order.end());
    return order;
}

ModulusResult compute_modulus(const PolygonQuad & q, const AdaptiveOptions & options)
{
    TriangulationOptions topt;
    topt.max_area = options.initial_max_area;
    topt.max_vertices = std::max<std::size_t>(options.budget, 16);
    TriMesh mesh = triangulate(q, topt);

    ModulusResult result;
    std::vector<double> guess;
    std::vector<double> u;
    std::vector<double> eta;

    for (std::size_t step = 0;; ++step) {
        const SparseSystem system = assemble(mesh, Problem::primal);
        CgResult cg = solve_cg(system, options.rel_tol, guess);
        result.cg_iterations += cg.iterations;
        u = std::move(cg.solution);

        result.energy_history.push_back(dirichlet_energy(mesh, u));
        result.dof_history.push_back(mesh.num_vertices());
        result.adaptive_steps = step + 1;

        eta = error_indicator(mesh, u, Problem::primal);
        if (options.max_iterations != 0 && step + 1 >= options.max_iterations) break;

        const auto marked = dorfler_mark(eta, options.dorfler_fraction);
        if (marked.empty()) break;
        Refinement refined = bisect_with_history(mesh, marked);
        if (refined.mesh.num_vertices() > options.budget) break;
        guess = prolongate(refined, u);
        mesh = std::move(refined.mesh);
    }

    const SparseSystem dual_system = assemble(mesh, Problem::conjugate);
    const CgResult dual = solve_cg(dual_system, options.rel_tol);
    result.cg_iterations += dual.iterations;

    result.energy_primal = result.energy_history.back();
    result.energy_dual = dirichlet_energy(mesh, dual.solution);
    result.modulus = std::sqrt(result.energy_primal / result.energy_dual);
    result.reciprocal_defect = std::abs(result.energy_primal * result.energy_dual - 1.0);
    result.eta_global = std::sqrt(std::accumulate(eta.begin(), eta.end(), 0.0));
    result.dofs = mesh.num_vertices();
    result.triangles = mesh.num_triangles();

    const auto [u_min, u_max] = std::minmax_element(u.begin(), u.end());
    const auto [d_min, d_max] = std::minmax_element(dual.solution.begin(), dual.solution.end());
    result.solution_min = std::min(*u_min, *d_min);
    result.solution_max = std::max(*u_max, *d_max);
    if (options.keep_mesh) result.mesh = std::move(mesh);
    return result;
}

} // namespace qmod::fem
