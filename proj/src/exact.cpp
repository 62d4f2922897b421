#include <qmod/exact.hpp>
#include <qmod/errors.hpp>
#include <qmod/specfun.hpp>

#include <cmath>
#include <numbers>

namespace qmod::exact {

using std::numbers::pi;

CircularQuadParams CircularQuadParams::make(double theta, double r)
{
    if (!(theta > 0.0 && theta < pi / 2)) {
        throw DomainError("circular quadrilateral requires 0 < theta < pi/2");
    }
    if (!(r > 0.0 && r < 1.0)) {
        throw DomainError("circular quadrilateral requires 0 < r < 1");
    }
    CircularQuadParams p{};
    p.theta = theta;
    p.r = r;
    p.u = std::tan(theta / 2.0);
    // 2r / (1 - r^2) > 0 on (0, 1), so arccot is arctan of the reciprocal.
    p.beta = std::atan((1.0 - r) * (1.0 + r) / (2.0 * r));
    p.rho = 2.0 * std::log((1.0 + p.u) / (1.0 - p.u));
    if (!(p.rho > 0.0) || !std::isfinite(p.rho)) {
        throw DomainError("degenerate circular quadrilateral");
    }
    return p;
}

double parallelogram_modulus(double t, double h)
{
    if (!(t > 0.0 && t <= pi / 2)) {
        throw DomainError("parallelogram modulus requires 0 < t <= pi/2");
    }
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw DomainError("parallelogram modulus requires h > 0");
    }
    const double a = std::min(t / pi, 0.5);
    const auto m = specfun::EllipticModulusPair::from_r(specfun::r_sub_a(a, h));
    return specfun::elliptic_K_prime(m) / specfun::elliptic_K(m);
}

TrapezoidModulus bowman_modulus(double h)
{
    if (!(h > 1.0) || !std::isfinite(h)) {
        throw DomainError("trapezoid modulus requires h > 1");
    }
    TrapezoidModulus out{};
    out.h = h;
    out.c1 = 2.0 * h - 1.0;
    out.t1 = specfun::inv_mu(0.5, pi / (2.0 * out.c1));
    out.t2 = specfun::inv_mu(0.5, pi * out.c1 / 2.0);
    const double q = (out.t1 - out.t2) / (out.t1 + out.t2);
    out.r = q * q;
    const auto m = specfun::EllipticModulusPair::from_r(out.r);
    out.value = specfun::elliptic_K(m) / specfun::elliptic_K_prime(m);
    return out;
}

double bowman_asymptotic(double h)
{
    return h - 0.5 - std::numbers::ln2 / pi;
}

double circular_quad_modulus(const CircularQuadParams & p)
{
    return (pi - 2.0 * p.beta) / p.rho;
}

} // namespace qmod::exact
