#include <qmod/specfun.hpp>
#include <qmod/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qmod::specfun {

namespace {

constexpr double pi = std::numbers::pi;

bool is_nonpositive_integer(double v)
{
    return v <= 0.0 && std::nearbyint(v) == v;
}

std::string describe(double a, double b, double c, double x)
{
    std::ostringstream os;
    os.precision(17);
    os << "F(" << a << ", " << b << "; " << c << "; " << x << ")";
    return os.str();
}

// A&S 15.3.10: F(a, b; a + b; x) re-expanded in powers of 1 - x with a
// logarithmic term. Valid for a, b not non-positive integers and 0 < 1-x < 1.
double connection_c_eq_a_plus_b(double a, double b, double x, double one_minus_x)
{
    const double prefactor = std::tgamma(a + b) / (std::tgamma(a) * std::tgamma(b));
    const double log_term = std::log(one_minus_x);

    double coef = 1.0;
    double psi_n1 = -std::numbers::egamma;
    double psi_a = digamma(a);
    double psi_b = digamma(b);
    double sum = 0.0;
    int small_terms = 0;

    for (std::size_t n = 0; n < series_term_cap; ++n) {
        const double term = coef * (2.0 * psi_n1 - psi_a - psi_b - log_term);
        sum += term;
        if (std::abs(term) < series_tolerance * std::abs(sum)) {
            if (++small_terms == 2) {
                return prefactor * sum;
            }
        } else {
            small_terms = 0;
        }
        const double dn = static_cast<double>(n);
        coef *= (a + dn) * (b + dn) / ((dn + 1.0) * (dn + 1.0)) * one_minus_x;
        psi_n1 += 1.0 / (dn + 1.0);
        psi_a += 1.0 / (a + dn);
        psi_b += 1.0 / (b + dn);
    }
    throw EvaluationError("connection series did not converge for " + describe(a, b, a + b, x),
                          prefactor * sum);
}

} // namespace

void HypergeometricParams::validate() const
{
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(x)) {
        throw DomainError("non-finite hypergeometric parameter");
    }
    if (is_nonpositive_integer(c)) {
        throw DomainError("hypergeometric parameter c must not be zero or a negative integer");
    }
    if (x < 0.0 || x >= 1.0) {
        throw DomainError("hypergeometric argument must lie in [0, 1)");
    }
}

EllipticModulusPair EllipticModulusPair::from_r(double r)
{
    if (!(r > 0.0 && r < 1.0)) {
        throw DomainError("elliptic modulus must lie in (0, 1)");
    }
    return {r, std::sqrt((1.0 - r) * (1.0 + r))};
}

EllipticModulusPair EllipticModulusPair::from_r_prime(double r_prime)
{
    auto m = from_r(r_prime);
    return {m.r_prime, m.r};
}

double gauss_2f1_series(double a, double b, double c, double x)
{
    HypergeometricParams{a, b, c, x}.validate();

    double term = 1.0;
    double sum = 0.0;
    int small_terms = 0;
    for (std::size_t n = 0; n < series_term_cap; ++n) {
        sum += term;
        if (term == 0.0) {
            return sum;
        }
        if (std::abs(term) < series_tolerance * std::abs(sum)) {
            if (++small_terms == 2) {
                return sum;
            }
        } else {
            small_terms = 0;
        }
        const double dn = static_cast<double>(n);
        term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * x;
    }
    throw EvaluationError("hypergeometric series did not converge for " + describe(a, b, c, x), sum);
}

double gauss_2f1(double a, double b, double c, double x, double one_minus_x)
{
    // x itself may round to 1 when the complement is tiny; the complement decides.
    HypergeometricParams{a, b, c, std::min(x, 0.5)}.validate();
    if (!(x >= 0.0 && one_minus_x > 0.0 && one_minus_x <= 1.0)) {
        throw DomainError("hypergeometric argument must lie in [0, 1)");
    }
    if (x == 0.0) {
        return 1.0;
    }
    const bool log_singular = std::abs(c - (a + b)) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(c));
    if (log_singular && x > 0.5 && !is_nonpositive_integer(a) && !is_nonpositive_integer(b)) {
        return connection_c_eq_a_plus_b(a, b, x, one_minus_x);
    }
    return gauss_2f1_series(a, b, c, x);
}

double gauss_2f1(const HypergeometricParams & p)
{
    return gauss_2f1(p.a, p.b, p.c, p.x, 1.0 - p.x);
}

double digamma(double x)
{
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("digamma is only provided for positive finite arguments");
    }
    double shift = 0.0;
    while (x < 16.0) {
        shift -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double tail = inv2 * (1.0 / 12.0
                       - inv2 * (1.0 / 120.0
                       - inv2 * (1.0 / 252.0
                       - inv2 * (1.0 / 240.0
                       - inv2 * (1.0 / 132.0)))));
    return shift + std::log(x) - 0.5 * inv - tail;
}

double agm(double x, double y)
{
    if (x < 0.0 || y < 0.0) {
        throw DomainError("agm requires non-negative arguments");
    }
    for (int i = 0; i < 64; ++i) {
        const double m = 0.5 * (x + y);
        if (std::abs(x - y) <= 2.0 * std::numeric_limits<double>::epsilon() * m) {
            return m;
        }
        y = std::sqrt(x * y);
        x = m;
    }
    return 0.5 * (x + y);
}

double elliptic_K(const EllipticModulusPair & m)
{
    return pi / (2.0 * agm(1.0, m.r_prime));
}

double elliptic_K_prime(const EllipticModulusPair & m)
{
    return pi / (2.0 * agm(1.0, m.r));
}

double agm_K(double r)
{
    if (!(r >= 0.0 && r < 1.0)) {
        throw DomainError("K(r) requires 0 <= r < 1");
    }
    return pi / (2.0 * agm(1.0, std::sqrt((1.0 - r) * (1.0 + r))));
}

double mu(double a, const EllipticModulusPair & m)
{
    if (!(a > 0.0 && a <= 0.5)) {
        throw DomainError("mu_a requires 0 < a <= 1/2");
    }
    if (!(m.r > 0.0 && m.r_prime > 0.0 && m.r <= 1.0 && m.r_prime <= 1.0)) {
        throw DomainError("mu_a requires 0 < r < 1");
    }
    const double r2 = m.r * m.r;
    const double rp2 = m.r_prime * m.r_prime;
    const double num = gauss_2f1(a, 1.0 - a, 1.0, rp2, r2);
    const double den = gauss_2f1(a, 1.0 - a, 1.0, r2, rp2);
    return pi / (2.0 * std::sin(pi * a)) * num / den;
}

double mu(double a, double r)
{
    return mu(a, EllipticModulusPair::from_r(r));
}

double inv_mu(double a, double y)
{
    if (!(a > 0.0 && a <= 0.5)) {
        throw DomainError("inv_mu requires 0 < a <= 1/2");
    }
    if (!(y > 0.0) || !std::isfinite(y)) {
        throw DomainError("inv_mu requires a positive finite value");
    }

    // mu_a is decreasing, so f is positive left of the root.
    auto f = [&](double r) { return mu(a, r) - y; };

    double lo = 1e-150;
    double hi = std::nextafter(1.0, 0.0);
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo < 0.0 || f_hi > 0.0) {
        std::ostringstream os;
        os << "inv_mu: value " << y << " is outside [" << f_hi + y << ", " << f_lo + y
           << "] reachable for a = " << a;
        throw RootFindError(os.str());
    }
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;

    auto collapsed = [&] { return std::nextafter(lo, 1.0) >= hi; };

    while (!collapsed() && hi - lo > 1e-6 * std::min(hi, 1.0 - lo)) {
        const double mid = (hi > 4.0 * lo) ? std::sqrt(lo) * std::sqrt(hi) : 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) > 0.0) lo = mid; else hi = mid;
    }

    const double tol = 1e-12 * std::max(1.0, y);
    double r = 0.5 * (lo + hi);
    double best_r = r;
    double best_f = std::numeric_limits<double>::infinity();

    for (int it = 0; it < 100 && !collapsed(); ++it) {
        const double fr = f(r);
        if (std::abs(fr) < best_f) {
            best_f = std::abs(fr);
            best_r = r;
        }
        if (best_f <= tol) break;
        if (fr > 0.0) lo = r; else hi = r;

        double step = 1e-7 * std::max(1.0, r);
        step = std::min(step, 0.01 * std::min(r, 1.0 - r));
        const double slope = (mu(a, r + step) - mu(a, r - step)) / (2.0 * step);

        double next = (slope < 0.0) ? r - fr / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (next == r) break;
        r = next;
    }
    return best_r;
}

double r_sub_a(double a, double h)
{
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw DomainError("r_sub_a requires h > 0");
    }
    if (!(a > 0.0 && a <= 0.5)) {
        throw DomainError("r_sub_a requires 0 < a <= 1/2");
    }
    return inv_mu(a, pi * h / (2.0 * std::sin(pi * a)));
}

} // namespace qmod::specfun
