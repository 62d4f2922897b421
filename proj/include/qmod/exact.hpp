#pragma once

// Closed-form conformal moduli used as references for the FEM solver.

namespace qmod::exact {

/// Modulus of the trapezoid with vertices 1+ih, i(h-1), 0, 1 together with
/// the intermediate quantities of its elliptic-function representation.
struct TrapezoidModulus
{
    double h;
    double value;
    double c1;   ///< 2h - 1
    double t1;   ///< mu_{1/2}^{-1}(pi / (2 c1))
    double t2;   ///< mu_{1/2}^{-1}(pi c1 / 2)
    double r;    ///< ((t1 - t2) / (t1 + t2))^2
};

/// Circular quadrilateral inside the unit disk: two arcs orthogonal to the
/// unit circle at e^{+-i theta}, e^{i(pi -+ theta)} and two arcs through
/// +-r, i, -i.
struct CircularQuadParams
{
    double theta;
    double r;
    double u;     ///< tan(theta / 2)
    double beta;  ///< arccot(2r / (1 - r^2))
    double rho;   ///< 2 log((1 + u) / (1 - u))

    /// Validates 0 < theta < pi/2, 0 < r < 1 and fills the derived fields.
    static CircularQuadParams make(double theta, double r);
};

/// g(t, h): modulus of the parallelogram QM(1 + h e^{it}, h e^{it}, 0, 1),
/// for 0 < t <= pi/2 and h > 0.
double parallelogram_modulus(double t, double h);

TrapezoidModulus bowman_modulus(double h);

/// Large-h expansion h - 1/2 - log(2)/pi of the trapezoid modulus.
double bowman_asymptotic(double h);

/// (pi - 2 beta) / rho.
double circular_quad_modulus(const CircularQuadParams & p);

} // namespace qmod::exact
