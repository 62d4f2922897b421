// qmod: conformal moduli of quadrilaterals, exact and by adaptive FEM.
//
//   qmod modulus square
//   qmod modulus trapezoid:h=1.5 --budget 50000
//   qmod modulus my_polygon.txt --out result.csv --mesh-out mesh.txt
//   qmod recip-grid --grid 5x5 --out recip.csv --svg recip.svg
//   qmod parallelogram --grid 32x16 --out par.csv
//   qmod trapezoid-table --out table1.csv
//   qmod circular-table --arc-segments 64 --out table2.csv
//   qmod mu-plot --out mu.csv
//
// Exit codes: 0 success, 2 input error, 3 numerical failure.

#include <qmod/errors.hpp>
#include <qmod/exact.hpp>
#include <qmod/experiments.hpp>
#include <qmod/fem.hpp>
#include <qmod/geometry.hpp>
#include <qmod/mesh.hpp>
#include <qmod/report.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int exit_input = 2;
constexpr int exit_numerical = 3;

struct InputError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

double parse_real(const std::string & text)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception &) {
        throw InputError("not a number: '" + text + "'");
    }
    if (used != text.size()) throw InputError("not a number: '" + text + "'");
    return v;
}

std::vector<double> parse_list(const std::string & text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_real(item));
    if (out.empty()) throw InputError("empty list");
    return out;
}

qmod::experiments::Range parse_range(const std::string & text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InputError("range must look like lo:hi, got '" + text + "'");
    return {parse_real(text.substr(0, colon)), parse_real(text.substr(colon + 1))};
}

std::pair<std::size_t, std::size_t> parse_grid(const std::string & text)
{
    const auto x = text.find('x');
    if (x == std::string::npos) throw InputError("grid must look like AxB, got '" + text + "'");
    const double a = parse_real(text.substr(0, x));
    const double b = parse_real(text.substr(x + 1));
    if (!(a >= 1 && b >= 1) || a != std::floor(a) || b != std::floor(b)) {
        throw InputError("grid sizes must be positive integers, got '" + text + "'");
    }
    return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
}

// Builtin shapes: square, rectangle:h=H, trapezoid:h=H, parallelogram:t=T,h=H,
// circular:theta=T,r=R. Anything else is read as a polygon file.
qmod::PolygonQuad load_shape(const std::string & spec, int arc_segments)
{
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    std::map<std::string, double> args;
    if (colon != std::string::npos) {
        std::stringstream ss(spec.substr(colon + 1));
        for (std::string kv; std::getline(ss, kv, ',');) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw InputError("shape argument must be key=value: '" + kv + "'");
            args[kv.substr(0, eq)] = parse_real(kv.substr(eq + 1));
        }
    }
    auto arg = [&](const std::string & key) {
        const auto it = args.find(key);
        if (it == args.end()) throw InputError("shape '" + name + "' needs " + key + "=");
        return it->second;
    };

    if (name == "square") return qmod::quad_from_corners({1, 1}, {0, 1}, {0, 0}, {1, 0});
    if (name == "rectangle") {
        const double h = arg("h");
        return qmod::quad_from_corners({1, h}, {0, h}, {0, 0}, {1, 0});
    }
    if (name == "trapezoid") return qmod::trapezoid(arg("h"));
    if (name == "parallelogram") return qmod::parallelogram(arg("t"), arg("h"));
    if (name == "circular") return qmod::discretize_circular_quad(arg("theta"), arg("r"), arc_segments);

    if (!std::filesystem::exists(spec)) {
        throw InputError("'" + spec + "' is neither a builtin shape nor an existing polygon file");
    }
    return qmod::read_polygon_file(spec);
}

void emit(const qmod::GridReport & report, const std::string & out_path)
{
    if (out_path.empty()) {
        report.write_csv(std::cout);
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw InputError("cannot write '" + out_path + "'");
    report.write_csv(out);
}

void emit_svg(const qmod::GridReport & report, const std::string & path, const std::string & x,
              const std::string & y, const std::string & value, const std::string & title)
{
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    report.write_svg_heatmap(out, x, y, value, title);
}

struct Common
{
    std::size_t budget = 200000;
    double tol = qmod::fem::default_cg_tolerance;
    unsigned threads = 0;
    std::string out;
    std::string svg;

    void add_solver(CLI::App * app)
    {
        app->add_option("--budget", budget, "Maximal number of mesh vertices")
            ->check(CLI::Range(std::size_t{16}, std::size_t{100000000}));
        app->add_option("--tol", tol, "CG relative residual tolerance")->check(CLI::PositiveNumber);
    }
    void add_sweep(CLI::App * app)
    {
        add_solver(app);
        app->add_option("--threads", threads, "Worker threads (0: all hardware threads)");
    }
    qmod::experiments::SweepOptions sweep() const
    {
        qmod::experiments::SweepOptions o;
        o.fem.budget = budget;
        o.fem.rel_tol = tol;
        o.threads = threads;
        return o;
    }
};

} // namespace

int main(int argc, char ** argv)
{
    CLI::App app{"Conformal moduli of quadrilaterals: exact formulas and adaptive FEM"};
    app.require_subcommand(1);
    Common c;

    std::string shape;
    std::string mesh_out;
    int arc_segments = 64;
    auto * modulus = app.add_subcommand("modulus", "Modulus of a polygon file or builtin shape");
    modulus->add_option("input", shape,
                        "Polygon file, or one of: square, rectangle:h=H, trapezoid:h=H, "
                        "parallelogram:t=T,h=H, circular:theta=T,r=R")
        ->required();
    c.add_solver(modulus);
    modulus->add_option("--arc-segments", arc_segments, "Segments per arc for circular shapes")
        ->check(CLI::PositiveNumber);
    modulus->add_option("--out", c.out, "Write a one-row CSV here");
    modulus->add_option("--mesh-out", mesh_out, "Dump the final mesh here");

    std::string grid;
    std::string x_range = "0.5:3";
    std::string y_range = "0.5:3";
    auto * recip = app.add_subcommand("recip-grid", "f(x,y) = QM(x+iy,i,0,1) - 1/QM(y+ix,i,0,1)");
    c.add_sweep(recip);
    recip->add_option("--grid", grid, "Grid size AxB (default 25x25)");
    recip->add_option("--x-range", x_range, "x range lo:hi, sampled at the right endpoints");
    recip->add_option("--y-range", y_range, "y range lo:hi, sampled at the right endpoints");
    recip->add_option("--out", c.out, "CSV output (default stdout)");
    recip->add_option("--svg", c.svg, "SVG heatmap of log10(|f|+1e-10)");

    std::string h_range = "0.5:2";
    std::string h_list;
    auto * par = app.add_subcommand("parallelogram", "g(t,h) exact against FEM");
    c.add_sweep(par);
    par->add_option("--grid", grid, "Grid size TxH (default 32x16)");
    par->add_option("--h-range", h_range, "h range lo:hi, endpoints included");
    par->add_option("--heights", h_list, "Explicit comma-separated h values (overrides --h-range)");
    par->add_option("--out", c.out, "CSV output (default stdout)");
    par->add_option("--svg", c.svg, "SVG heatmap of the log10 error");

    auto * trap = app.add_subcommand("trapezoid-table", "Trapezoid moduli: FEM against the exact formula");
    c.add_sweep(trap);
    trap->add_option("--heights", h_list, "Comma-separated heights (default 1.1,...,2.0)");
    trap->add_option("--out", c.out, "CSV output (default stdout)");

    std::string theta_list;
    double radius = 0.4;
    auto * circ = app.add_subcommand("circular-table", "Circular quadrilateral: FEM against the closed form");
    c.add_sweep(circ);
    circ->add_option("--theta", theta_list, "Comma-separated angles (default 0.10,0.15,...,1.20)");
    circ->add_option("--r", radius, "Radius parameter r");
    circ->add_option("--arc-segments", arc_segments, "Segments per arc")->check(CLI::PositiveNumber);
    circ->add_option("--out", c.out, "CSV output (default stdout)");

    std::string a_list = "0.1,0.2,0.3,0.4,0.5";
    std::size_t r_steps = 99;
    auto * mu = app.add_subcommand("mu-plot", "Table of mu_a(r)");
    mu->add_option("--a", a_list, "Comma-separated values of a in (0, 1/2]");
    mu->add_option("--r-steps", r_steps, "Number of interior r samples")->check(CLI::PositiveNumber);
    mu->add_option("--out", c.out, "CSV output (default stdout)");
    mu->add_option("--svg", c.svg, "SVG heatmap of mu over (a, r)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success & e) {
        return app.exit(e);
    } catch (const CLI::ParseError & e) {
        app.exit(e);
        return exit_input;
    }

    try {
        if (*modulus) {
            const auto q = load_shape(shape, arc_segments);
            qmod::fem::AdaptiveOptions o;
            o.budget = c.budget;
            o.rel_tol = c.tol;
            o.keep_mesh = !mesh_out.empty();
            const auto r = qmod::fem::compute_modulus(q, o);
            std::printf("modulus            %.12g\n", r.modulus);
            std::printf("dofs               %zu\n", r.dofs);
            std::printf("reciprocal_defect  %.3e\n", r.reciprocal_defect);
            std::printf("energy_primal      %.12g\n", r.energy_primal);
            std::printf("energy_dual        %.12g\n", r.energy_dual);
            std::printf("eta_global         %.3e\n", r.eta_global);
            std::printf("cg_iterations      %zu\n", r.cg_iterations);
            std::printf("adaptive_steps     %zu\n", r.adaptive_steps);
            if (!c.out.empty()) {
                qmod::GridReport report({"modulus", "dofs", "energy_primal", "energy_dual",
                                         "reciprocal_defect", "eta_global", "cg_iterations"});
                report.set_metadata("command", "modulus");
                report.set_metadata("input", shape);
                report.set_metadata("budget", std::to_string(c.budget));
                report.set_metadata("tol", qmod::format_real(c.tol));
                report.add_row({r.modulus, static_cast<double>(r.dofs), r.energy_primal, r.energy_dual,
                                r.reciprocal_defect, r.eta_global, static_cast<double>(r.cg_iterations)});
                emit(report, c.out);
            }
            if (!mesh_out.empty()) {
                std::ofstream out(mesh_out);
                if (!out) throw InputError("cannot write '" + mesh_out + "'");
                qmod::write_mesh(out, r.mesh);
            }
        } else if (*recip) {
            const auto [nx, ny] = grid.empty() ? std::pair<std::size_t, std::size_t>{25, 25} : parse_grid(grid);
            const auto report = qmod::experiments::recip_grid(parse_range(x_range), parse_range(y_range), nx,
                                                              ny, c.sweep());
            emit(report, c.out);
            emit_svg(report, c.svg, "x", "y", "log10_abs_f", "log10(|f(x,y)| + 1e-10)");
        } else if (*par) {
            const auto [nt, nh] = grid.empty() ? std::pair<std::size_t, std::size_t>{32, 16} : parse_grid(grid);
            std::vector<double> hs;
            if (!h_list.empty()) {
                hs = parse_list(h_list);
            } else {
                const auto range = parse_range(h_range);
                hs = qmod::experiments::linspace(range.lo, range.hi, nh);
            }
            const auto report = qmod::experiments::parallelogram_grid(nt, hs, c.sweep());
            emit(report, c.out);
            emit_svg(report, c.svg, "t", "h", "log10_error", "log10(|g_exact - g_fem| + 1e-10)");
        } else if (*trap) {
            const auto hs = h_list.empty() ? qmod::experiments::default_trapezoid_heights() : parse_list(h_list);
            emit(qmod::experiments::trapezoid_table(hs, c.sweep()), c.out);
        } else if (*circ) {
            const auto thetas =
                theta_list.empty() ? qmod::experiments::default_circular_thetas() : parse_list(theta_list);
            emit(qmod::experiments::circular_table(thetas, radius, arc_segments, c.sweep()), c.out);
        } else if (*mu) {
            const auto report = qmod::experiments::mu_table(parse_list(a_list), r_steps);
            emit(report, c.out);
            emit_svg(report, c.svg, "r", "a", "mu", "mu_a(r)");
        }
    } catch (const InputError & e) {
        std::fprintf(stderr, "qmod: %s\n", e.what());
        return exit_input;
    } catch (const qmod::GeometryError & e) {
        std::fprintf(stderr, "qmod: invalid geometry: %s\n", e.what());
        return exit_input;
    } catch (const qmod::DomainError & e) {
        std::fprintf(stderr, "qmod: invalid parameter: %s\n", e.what());
        return exit_input;
    } catch (const qmod::Error & e) {
        std::fprintf(stderr, "qmod: numerical failure: %s\n", e.what());
        return exit_numerical;
    } catch (const std::invalid_argument & e) {
        std::fprintf(stderr, "qmod: %s\n", e.what());
        return exit_input;
    }
    return 0;
}
