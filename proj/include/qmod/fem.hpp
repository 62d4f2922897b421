#pragma once

// Piecewise-linear finite elements for the mixed Dirichlet-Neumann problem
// whose Dirichlet energy is the modulus of a quadrilateral.
//
// For the primal problem u = 0 on gamma2, u = 1 on gamma4 and the normal
// derivative vanishes on gamma1 and gamma3. The conjugate problem belongs to
// the quadrilateral (D; z2, z3, z4, z1): u = 0 on gamma3, u = 1 on gamma1.

#include <qmod/geometry.hpp>
#include <qmod/mesh.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace qmod::fem {

enum class Problem { primal, conjugate };

/// Symmetric stiffness system in compressed-row form. Dirichlet rows are
/// replaced by identity rows and their columns eliminated into the rhs.
struct SparseSystem
{
    std::size_t dimension = 0;
    std::vector<std::size_t> row_offsets;
    std::vector<Index> column_indices;
    std::vector<double> values;
    std::vector<double> rhs;
    std::vector<std::optional<double>> dirichlet;

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    double entry(std::size_t row, std::size_t col) const;
    std::size_t free_dofs() const;
};

/// Local P1 stiffness matrix of the triangle (a, b, c).
std::array<std::array<double, 3>, 3> local_stiffness(Point a, Point b, Point c);

/// Gradient of the linear interpolant of (ua, ub, uc) on triangle (a, b, c).
Point p1_gradient(Point a, Point b, Point c, double ua, double ub, double uc);

/// Unconstrained P1 stiffness matrix (zero rhs, no Dirichlet rows). Throws
/// AssemblyError if the boundary labels do not match the triangulation.
SparseSystem assemble_stiffness(const TriMesh & m);

/// Stiffness system with the Dirichlet data of `problem` folded in.
/// Throws AssemblyError if a boundary edge of the triangulation carries no arc label.
SparseSystem assemble(const TriMesh & m, Problem problem = Problem::primal);

struct CgResult
{
    std::vector<double> solution;
    std::size_t iterations = 0;
    double relative_residual = 0.0;
};

inline constexpr double default_cg_tolerance = 1e-10;

/// Jacobi-preconditioned conjugate gradients. Stops when
/// ||b - A x|| <= rel_tol * ||b||; throws SolverError after
/// 20 sqrt(n) + 1000 iterations.
CgResult solve_cg(const SparseSystem & s, double rel_tol = default_cg_tolerance,
                  std::span<const double> initial_guess = {});

/// Sum over triangles of area * |grad u|^2.
double dirichlet_energy(const TriMesh & m, std::span<const double> u);

/// Squared residual indicator per triangle: for every edge e of T,
/// |e|^2 times the squared normal-derivative jump (interior edges), the
/// squared normal derivative (Neumann edges) or zero (Dirichlet edges).
std::vector<double> error_indicator(const TriMesh & m, std::span<const double> u,
                                    Problem problem = Problem::primal);

/// Smallest set of triangles (largest indicators first) carrying at least
/// `fraction` of the total indicator sum. Ties go to the lower index.
std::vector<Index> dorfler_mark(std::span<const double> eta_squared, double fraction);

struct AdaptiveOptions
{
    std::size_t budget = 200000;           ///< maximal number of mesh vertices
    double rel_tol = default_cg_tolerance; ///< CG relative residual
    double dorfler_fraction = 0.5;
    double initial_max_area = 0.0;         ///< <= 0 selects polygon area / 64
    std::size_t max_iterations = 0;        ///< 0: refine until the budget stops it
    bool keep_mesh = false;                ///< store the final mesh in the result
};

struct ModulusResult
{
    double modulus = 0.0;            ///< sqrt(energy_primal / energy_dual)
    std::size_t dofs = 0;            ///< vertices of the final mesh
    double energy_primal = 0.0;
    double energy_dual = 0.0;
    double reciprocal_defect = 0.0;  ///< |energy_primal * energy_dual - 1|
    double eta_global = 0.0;         ///< sqrt of the summed primal indicators
    std::size_t cg_iterations = 0;   ///< over every solve of the run
    std::size_t triangles = 0;
    std::size_t adaptive_steps = 0;
    double solution_min = 0.0;       ///< over the final primal and dual solutions
    double solution_max = 0.0;
    std::vector<double> energy_history;   ///< primal energy per adaptive step
    std::vector<std::size_t> dof_history;
    TriMesh mesh;                    ///< final mesh, only with keep_mesh
};

ModulusResult compute_modulus(const PolygonQuad & q, const AdaptiveOptions & options = {});

} // namespace qmod::fem
