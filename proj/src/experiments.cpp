#include <qmod/experiments.hpp>

#include <qmod/errors.hpp>
#include <qmod/exact.hpp>
#include <qmod/geometry.hpp>
#include <qmod/specfun.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

namespace qmod::experiments {

namespace {

double log_error(double e) { return std::log10(std::abs(e) + 1e-10); }

void stamp(GridReport & report, const std::string & command, const SweepOptions & options)
{
    report.set_metadata("command", command);
    report.set_metadata("budget", std::to_string(options.fem.budget));
    report.set_metadata("tol", format_real(options.fem.rel_tol));
}

std::string join(const std::vector<double> & values)
{
    std::string out;
    for (const double v : values) {
        if (!out.empty()) out += ';';
        out += format_real(v);
    }
    return out;
}

} // namespace

std::vector<double> right_endpoints(Range r, std::size_t n)
{
    if (n == 0) throw DomainError("grid needs at least one step");
    if (!(r.hi > r.lo)) throw DomainError("grid range must satisfy lo < hi");
    std::vector<double> out(n);
    for (std::size_t k = 1; k <= n; ++k) {
        out[k - 1] = r.lo + static_cast<double>(k) * (r.hi - r.lo) / static_cast<double>(n);
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n)
{
    if (n == 0) throw DomainError("linspace needs at least one point");
    if (n == 1) return {lo};
    std::vector<double> out(n);
    const double d = static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        // Weighted form keeps both endpoints exact.
        out[j] = (lo * static_cast<double>(n - 1 - j) + hi * static_cast<double>(j)) / d;
    }
    return out;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> & body)
{
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));

    std::atomic<std::size_t> next{0};
    std::mutex guard;
    std::size_t failed_index = n;
    std::exception_ptr failure;

    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(guard);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

GridReport recip_grid(Range x, Range y, std::size_t nx, std::size_t ny, const SweepOptions & options)
{
    if (!(x.lo >= 0.0 && x.hi <= 3.0 && y.lo >= 0.0 && y.hi <= 3.0)) {
        throw DomainError("reciprocal grid ranges must lie in (0, 3]");
    }
    const auto xs = right_endpoints(x, nx);
    const auto ys = right_endpoints(y, ny);

    struct Cell
    {
        fem::ModulusResult xy, yx;
    };
    std::vector<Cell> cells(nx * ny);
    parallel_for(cells.size(), options.threads, [&](std::size_t i) {
        const double xv = xs[i % nx];
        const double yv = ys[i / nx];
        const Point z2{0.0, 1.0}, z3{0.0, 0.0}, z4{1.0, 0.0};
        cells[i].xy = fem::compute_modulus(quad_from_corners({xv, yv}, z2, z3, z4), options.fem);
        cells[i].yx = fem::compute_modulus(quad_from_corners({yv, xv}, z2, z3, z4), options.fem);
    });

    GridReport report({"x", "y", "f", "log10_abs_f", "qm_xy", "qm_yx", "defect_xy", "defect_yx",
                       "u_min", "u_max", "dofs"});
    stamp(report, "recip-grid", options);
    report.set_metadata("x_range", format_real(x.lo) + ":" + format_real(x.hi));
    report.set_metadata("y_range", format_real(y.lo) + ":" + format_real(y.hi));
    report.set_metadata("grid", std::to_string(nx) + "x" + std::to_string(ny));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto & c = cells[i];
        const double f = c.xy.modulus - 1.0 / c.yx.modulus;
        report.add_row({xs[i % nx], ys[i / nx], f, log_error(f), c.xy.modulus, c.yx.modulus,
                        c.xy.reciprocal_defect, c.yx.reciprocal_defect,
                        std::min(c.xy.solution_min, c.yx.solution_min),
                        std::max(c.xy.solution_max, c.yx.solution_max),
                        static_cast<double>(std::max(c.xy.dofs, c.yx.dofs))});
    }
    return report;
}

GridReport parallelogram_grid(std::size_t t_steps, const std::vector<double> & h_values,
                              const SweepOptions & options)
{
    if (t_steps == 0 || h_values.empty()) throw DomainError("parallelogram grid is empty");
    for (const double h : h_values) {
        if (!(h > 0.0)) throw DomainError("parallelogram heights must be positive");
    }
    std::vector<double> ts(t_steps);
    for (std::size_t k = 1; k <= t_steps; ++k) {
        ts[k - 1] = static_cast<double>(k) * (std::numbers::pi / 2.0) / static_cast<double>(t_steps + 1);
    }

    const std::size_t nh = h_values.size();
    std::vector<fem::ModulusResult> results(t_steps * nh);
    parallel_for(results.size(), options.threads, [&](std::size_t i) {
        results[i] = fem::compute_modulus(parallelogram(ts[i / nh], h_values[i % nh]), options.fem);
    });

    GridReport report({"t", "h", "g_exact", "g_fem", "log10_error", "reciprocal_defect", "u_min",
                       "u_max", "dofs"});
    stamp(report, "parallelogram", options);
    report.set_metadata("t_steps", std::to_string(t_steps));
    report.set_metadata("h", join(h_values));
    for (std::size_t i = 0; i < results.size(); ++i) {
        const double t = ts[i / nh];
        const double h = h_values[i % nh];
        const double exact = exact::parallelogram_modulus(t, h);
        const auto & r = results[i];
        report.add_row({t, h, exact, r.modulus, log_error(exact - r.modulus), r.reciprocal_defect,
                        r.solution_min, r.solution_max, static_cast<double>(r.dofs)});
    }
    return report;
}

GridReport trapezoid_table(const std::vector<double> & h_values, const SweepOptions & options)
{
    for (const double h : h_values) {
        if (!(h > 1.0)) throw DomainError("trapezoid heights must exceed 1");
    }
    std::vector<fem::ModulusResult> results(h_values.size());
    parallel_for(results.size(), options.threads, [&](std::size_t i) {
        results[i] = fem::compute_modulus(trapezoid(h_values[i]), options.fem);
    });

    GridReport report({"h", "fem", "bowman", "error", "reciprocal_defect", "u_min", "u_max", "dofs"});
    stamp(report, "trapezoid-table", options);
    report.set_metadata("h", join(h_values));
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto & r = results[i];
        const double exact = exact::bowman_modulus(h_values[i]).value;
        report.add_row({h_values[i], r.modulus, exact, std::abs(r.modulus - exact), r.reciprocal_defect,
                        r.solution_min, r.solution_max, static_cast<double>(r.dofs)});
    }
    return report;
}

GridReport circular_table(const std::vector<double> & thetas, double r, int arc_segments,
                          const SweepOptions & options)
{
    std::vector<exact::CircularQuadParams> params;
    params.reserve(thetas.size());
    for (const double theta : thetas) params.push_back(exact::CircularQuadParams::make(theta, r));

    std::vector<fem::ModulusResult> results(thetas.size());
    parallel_for(results.size(), options.threads, [&](std::size_t i) {
        results[i] = fem::compute_modulus(discretize_circular_quad(thetas[i], r, arc_segments), options.fem);
    });

    GridReport report({"theta", "fem", "exact", "error", "reciprocal_defect", "u_min", "u_max", "dofs"});
    stamp(report, "circular-table", options);
    report.set_metadata("r", format_real(r));
    report.set_metadata("arc_segments", std::to_string(arc_segments));
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto & res = results[i];
        const double exact = exact::circular_quad_modulus(params[i]);
        report.add_row({thetas[i], res.modulus, exact, std::abs(res.modulus - exact), res.reciprocal_defect,
                        res.solution_min, res.solution_max, static_cast<double>(res.dofs)});
    }
    return report;
}

GridReport mu_table(const std::vector<double> & a_values, std::size_t r_steps)
{
    if (r_steps == 0) throw DomainError("mu table needs at least one r step");
    GridReport report({"a", "r", "mu", "product"});
    report.set_metadata("command", "mu-plot");
    report.set_metadata("a", join(a_values));
    report.set_metadata("r_steps", std::to_string(r_steps));
    for (const double a : a_values) {
        if (!(a > 0.0 && a <= 0.5)) throw DomainError("mu table requires 0 < a <= 1/2");
        for (std::size_t k = 1; k <= r_steps; ++k) {
            const double r = static_cast<double>(k) / static_cast<double>(r_steps + 1);
            const auto pair = specfun::EllipticModulusPair::from_r(r);
            const auto conj = specfun::EllipticModulusPair{pair.r_prime, pair.r};
            const double m = specfun::mu(a, pair);
            report.add_row({a, r, m, m * specfun::mu(a, conj)});
        }
    }
    return report;
}

std::vector<double> default_trapezoid_heights()
{
    std::vector<double> out;
    for (int k = 11; k <= 20; ++k) out.push_back(k / 10.0);
    return out;
}

std::vector<double> default_circular_thetas()
{
    std::vector<double> out;
    for (int k = 10; k <= 120; k += 5) out.push_back(k / 100.0);
    return out;
}

} // namespace qmod::experiments
