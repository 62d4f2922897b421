#pragma once

// Parameter sweeps behind the command-line tool. Every cell of a sweep is an
// independent modulus computation; rows always come out in grid order.

#include <qmod/fem.hpp>
#include <qmod/report.hpp>

#include <cstddef>
#include <functional>
#include <vector>

namespace qmod::experiments {

struct SweepOptions
{
    fem::AdaptiveOptions fem;
    unsigned threads = 0; ///< 0: one per hardware thread
};

/// Open-closed interval (lo, hi].
struct Range
{
    double lo = 0.0;
    double hi = 0.0;
};

/// lo + k (hi - lo) / n for k = 1..n.
std::vector<double> right_endpoints(Range r, std::size_t n);

/// n equally spaced values from lo to hi inclusive (n >= 2), or {lo} for n = 1.
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Runs body(i) for i in [0, n) on up to `threads` workers. If any call
/// throws, the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> & body);

/// f(x, y) = QM(x+iy, i, 0, 1) - 1 / QM(y+ix, i, 0, 1) over the grid
/// right_endpoints(x) x right_endpoints(y), x varying fastest.
GridReport recip_grid(Range x, Range y, std::size_t nx, std::size_t ny, const SweepOptions & options);

/// g_exact(t, h) against the FEM value for t_k = k (pi/2) / (t_steps + 1).
GridReport parallelogram_grid(std::size_t t_steps, const std::vector<double> & h_values,
                              const SweepOptions & options);

/// FEM value of the trapezoid modulus against the elliptic-integral formula.
GridReport trapezoid_table(const std::vector<double> & h_values, const SweepOptions & options);

/// FEM value for the circular quadrilateral discretized with `arc_segments`
/// segments per arc, against the closed form.
GridReport circular_table(const std::vector<double> & thetas, double r, int arc_segments,
                          const SweepOptions & options);

/// mu_a(r) on r_k = k / (r_steps + 1), with the product mu_a(r) mu_a(r').
GridReport mu_table(const std::vector<double> & a_values, std::size_t r_steps);

std::vector<double> default_trapezoid_heights();  ///< 1.1, 1.2, ..., 2.0
std::vector<double> default_circular_thetas();    ///< 0.10, 0.15, ..., 1.20

} // namespace qmod::experiments
