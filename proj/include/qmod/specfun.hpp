#pragma once

// Special functions used by the closed-form moduli: the Gauss hypergeometric
// function on [0, 1), complete elliptic integrals, and the generalized
// Grötzsch function mu_a with its inverse. All functions are pure.

#include <cstddef>

namespace qmod::specfun {

struct HypergeometricParams
{
    double a;
    double b;
    double c;
    double x;

    /// Throws DomainError unless c is not a non-positive integer and 0 <= x < 1.
    void validate() const;
};

/// A modulus r together with its complement r' = sqrt(1 - r^2).
///
/// Keeping both avoids recomputing the complement near the endpoints, where
/// sqrt(1 - r*r) loses most of its significant digits.
struct EllipticModulusPair
{
    double r;
    double r_prime;

    static EllipticModulusPair from_r(double r);
    static EllipticModulusPair from_r_prime(double r_prime);
};

/// Series truncation threshold relative to the partial sum.
inline constexpr double series_tolerance = 1e-16;
/// Hard cap on the number of series terms; exceeding it is an EvaluationError.
inline constexpr std::size_t series_term_cap = 20000;

/// F(a, b; c; x) for 0 <= x < 1.
///
/// Sums the defining series directly, except for c = a + b with x > 1/2,
/// where the logarithmic connection formula around 1 - x is used instead.
double gauss_2f1(const HypergeometricParams & p);

/// Same as gauss_2f1 but with 1 - x supplied by the caller so that arguments
/// close to 1 keep full relative accuracy in the complement.
double gauss_2f1(double a, double b, double c, double x, double one_minus_x);

/// Plain partial sums of the defining series, no connection formula.
/// Throws EvaluationError when the term cap is reached.
double gauss_2f1_series(double a, double b, double c, double x);

/// Digamma function for positive arguments.
double digamma(double x);

/// Arithmetic-geometric mean of two non-negative numbers.
double agm(double x, double y);

/// Complete elliptic integral K(r), 0 <= r < 1, via the AGM.
double agm_K(double r);

/// K(r) from a modulus pair, K(r) = pi / (2 AGM(1, r')).
double elliptic_K(const EllipticModulusPair & m);
/// K'(r) = K(r') from a modulus pair.
double elliptic_K_prime(const EllipticModulusPair & m);

/// mu_a(r) = pi / (2 sin(pi a)) * F(a, 1-a; 1; 1-r^2) / F(a, 1-a; 1; r^2).
/// Domain: 0 < a <= 1/2, 0 < r < 1. Strictly decreasing in r.
double mu(double a, double r);
double mu(double a, const EllipticModulusPair & m);

/// Inverse of mu_a: the r in (0, 1) with mu_a(r) = y.
///
/// Bisection down to a narrow bracket followed by safeguarded Newton steps
/// with a centered finite-difference derivative. Throws RootFindError when y
/// lies outside what mu_a can reach in double precision.
double inv_mu(double a, double y);

/// r_a = mu_a^{-1}(pi h / (2 sin(pi a))).
double r_sub_a(double a, double h);

} // namespace qmod::specfun
