#include <qmod/errors.hpp>
#include <qmod/exact.hpp>
#include <qmod/fem.hpp>
#include <qmod/geometry.hpp>
#include <qmod/specfun.hpp>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qmod;

namespace {

std::vector<Point> to_points(const std::vector<std::pair<double, double>> & xy)
{
    std::vector<Point> out;
    out.reserve(xy.size());
    for (const auto & [x, y] : xy) out.push_back({x, y});
    return out;
}

std::pair<double, double> to_pair(Point p) { return {p.x, p.y}; }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Conformal moduli of quadrilaterals";

    static py::exception<Error> qmod_error(m, "Error", PyExc_RuntimeError);
    static py::exception<DomainError> domain_error(m, "DomainError", qmod_error.ptr());
    static py::exception<GeometryError> geometry_error(m, "GeometryError", qmod_error.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const DomainError & e) {
            py::set_error(domain_error, e.what());
        } catch (const GeometryError & e) {
            py::set_error(geometry_error, e.what());
        } catch (const Error & e) {
            py::set_error(qmod_error, e.what());
        }
    });

    m.def("hyp2f1", [](double a, double b, double c, double x) {
        return specfun::gauss_2f1(specfun::HypergeometricParams{a, b, c, x});
    }, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("x"), "Gauss hypergeometric F(a,b;c;x), 0 <= x < 1");
    m.def("elliptic_k", &specfun::agm_K, py::arg("r"), "Complete elliptic integral K(r)");
    m.def("mu", py::overload_cast<double, double>(&specfun::mu), py::arg("a"), py::arg("r"));
    m.def("inv_mu", &specfun::inv_mu, py::arg("a"), py::arg("y"));

    m.def("parallelogram_modulus", &exact::parallelogram_modulus, py::arg("t"), py::arg("h"));
    m.def("bowman_modulus", [](double h) { return exact::bowman_modulus(h).value; }, py::arg("h"));
    m.def("bowman_asymptotic", &exact::bowman_asymptotic, py::arg("h"));
    m.def("circular_quad_modulus", [](double theta, double r) {
        return exact::circular_quad_modulus(exact::CircularQuadParams::make(theta, r));
    }, py::arg("theta"), py::arg("r"));

    py::class_<PolygonQuad>(m, "Quad")
        .def(py::init([](const std::vector<std::pair<double, double>> & vertices,
                         std::array<std::size_t, 4> corners) {
            return PolygonQuad(to_points(vertices), corners);
        }), py::arg("vertices"), py::arg("corners"))
        .def_property_readonly("vertices", [](const PolygonQuad & q) {
            std::vector<std::pair<double, double>> out;
            for (const auto & p : q.vertices()) out.push_back(to_pair(p));
            return out;
        })
        .def_property_readonly("corners", &PolygonQuad::corners)
        .def_property_readonly("area", &PolygonQuad::area)
        .def("conjugate", &PolygonQuad::conjugate)
        .def("transformed", [](const PolygonQuad & q, double scale, double angle, std::pair<double, double> shift) {
            return q.transformed(scale, angle, {shift.first, shift.second});
        }, py::arg("scale"), py::arg("angle") = 0.0, py::arg("shift") = std::pair<double, double>{0.0, 0.0})
        .def("__len__", &PolygonQuad::size);

    m.def("quad_from_corners", [](std::pair<double, double> z1, std::pair<double, double> z2,
                                  std::pair<double, double> z3, std::pair<double, double> z4) {
        return quad_from_corners({z1.first, z1.second}, {z2.first, z2.second}, {z3.first, z3.second},
                                 {z4.first, z4.second});
    });
    m.def("parallelogram", &parallelogram, py::arg("t"), py::arg("h"));
    m.def("trapezoid", &trapezoid, py::arg("h"));
    m.def("circular_quad", &discretize_circular_quad, py::arg("theta"), py::arg("r"), py::arg("n") = 64);
    m.def("read_polygon", &read_polygon_file, py::arg("path"));

    py::class_<fem::AdaptiveOptions>(m, "AdaptiveOptions")
        .def(py::init<>())
        .def_readwrite("budget", &fem::AdaptiveOptions::budget)
        .def_readwrite("rel_tol", &fem::AdaptiveOptions::rel_tol)
        .def_readwrite("dorfler_fraction", &fem::AdaptiveOptions::dorfler_fraction)
        .def_readwrite("max_iterations", &fem::AdaptiveOptions::max_iterations);

    py::class_<fem::ModulusResult>(m, "ModulusResult")
        .def_readonly("modulus", &fem::ModulusResult::modulus)
        .def_readonly("dofs", &fem::ModulusResult::dofs)
        .def_readonly("energy_primal", &fem::ModulusResult::energy_primal)
        .def_readonly("energy_dual", &fem::ModulusResult::energy_dual)
        .def_readonly("reciprocal_defect", &fem::ModulusResult::reciprocal_defect)
        .def_readonly("eta_global", &fem::ModulusResult::eta_global)
        .def_readonly("cg_iterations", &fem::ModulusResult::cg_iterations)
        .def_readonly("adaptive_steps", &fem::ModulusResult::adaptive_steps)
        .def("__repr__", [](const fem::ModulusResult & r) {
            return "<ModulusResult modulus=" + std::to_string(r.modulus) + " dofs=" + std::to_string(r.dofs) + ">";
        });

    m.def("compute_modulus", [](const PolygonQuad & q, std::size_t budget, double rel_tol) {
        fem::AdaptiveOptions o;
        o.budget = budget;
        o.rel_tol = rel_tol;
        py::gil_scoped_release release;
        return fem::compute_modulus(q, o);
    }, py::arg("quad"), py::arg("budget") = 200000, py::arg("rel_tol") = fem::default_cg_tolerance);
    m.def("compute_modulus", [](const PolygonQuad & q, const fem::AdaptiveOptions & o) {
        py::gil_scoped_release release;
        return fem::compute_modulus(q, o);
    }, py::arg("quad"), py::arg("options"));
}
