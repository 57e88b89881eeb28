#ifndef ELLBILL_ELLIPTIC_INTEGRALS_HPP
#define ELLBILL_ELLIPTIC_INTEGRALS_HPP

// Complete elliptic integrals of the first and third kind.
//
// Every function here uses the *parameter* convention:
//
//   K(m)    = int_0^{pi/2} da / sqrt(1 - m sin^2 a)
//   Pi(n,m) = int_0^{pi/2} da / ((1 - n sin^2 a) sqrt(1 - m sin^2 a))
//
// Formulas written with a modulus argument, K(k) with k^2 under the root,
// go through the `modulus_form` namespace at the bottom of this file.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ellbill/errors.hpp"

namespace ellbill::elliptic {

namespace detail {

/// Carlson's degenerate form R_C(x, y) for x >= 0, y > 0.
inline double carlson_rc(double x, double y)
{
    constexpr double errtol = 0.0012;
    constexpr double c1 = 0.3, c2 = 1.0 / 7.0, c3 = 0.375, c4 = 9.0 / 22.0;
    double ave = 0.0;
    double s = 0.0;
    for (int it = 0; it < 100; ++it) {
        const double lambda = 2.0 * std::sqrt(x) * std::sqrt(y) + y;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        ave = (x + y + y) / 3.0;
        s = (y - ave) / ave;
        if (std::abs(s) <= errtol)
            break;
    }
    return (1.0 + s * s * (c1 + s * (c2 + s * (c3 + s * c4)))) / std::sqrt(ave);
}

} // namespace detail

/// Carlson's symmetric integral R_F(x, y, z); at most one argument may be zero.
inline double carlson_rf(double x, double y, double z)
{
    if (x < 0.0 || y < 0.0 || z < 0.0 || std::min({x + y, x + z, y + z}) <= 0.0)
        throw DomainError("carlson_rf: arguments must be non-negative with at most one zero");

    // Truncation error of the final series is below errtol^6 / 4.
    constexpr double errtol = 0.0008;
    double ave = 0.0, dx = 0.0, dy = 0.0, dz = 0.0;
    for (int it = 0; it < 100; ++it) {
        const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const double lambda = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        ave = (x + y + z) / 3.0;
        dx = (ave - x) / ave;
        dy = (ave - y) / ave;
        dz = (ave - z) / ave;
        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) <= errtol)
            break;
    }
    const double e2 = dx * dy - dz * dz;
    const double e3 = dx * dy * dz;
    return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / std::sqrt(ave);
}

/// Carlson's symmetric integral R_J(x, y, z, p) for p > 0.
inline double carlson_rj(double x, double y, double z, double p)
{
    if (x < 0.0 || y < 0.0 || z < 0.0 || std::min({x + y, x + z, y + z}) <= 0.0 || p <= 0.0)
        throw DomainError("carlson_rj: requires x, y, z >= 0 (at most one zero) and p > 0");

    constexpr double errtol = 0.0005;
    constexpr double c1 = 3.0 / 14.0, c2 = 1.0 / 3.0, c3 = 3.0 / 22.0, c4 = 3.0 / 26.0;
    constexpr double c5 = 0.75 * c3, c6 = 1.5 * c4, c7 = 0.5 * c2, c8 = c3 + c3;

    double sum = 0.0, fac = 1.0;
    double ave = 0.0, dx = 0.0, dy = 0.0, dz = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
        const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const double lambda = sx * (sy + sz) + sy * sz;
        const double alpha = std::pow(p * (sx + sy + sz) + sx * sy * sz, 2);
        const double beta = p * std::pow(p + lambda, 2);
        sum += fac * detail::carlson_rc(alpha, beta);
        fac *= 0.25;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        p = 0.25 * (p + lambda);
        ave = 0.2 * (x + y + z + p + p);
        dx = (ave - x) / ave;
        dy = (ave - y) / ave;
        dz = (ave - z) / ave;
        dp = (ave - p) / ave;
        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz), std::abs(dp)}) <= errtol)
            break;
    }
    const double ea = dx * (dy + dz) + dy * dz;
    const double eb = dx * dy * dz;
    const double ec = dp * dp;
    const double ed = ea - 3.0 * ec;
    const double ee = eb + 2.0 * dp * (ea - ec);
    return 3.0 * sum
        + fac * (1.0 + ed * (-c1 + c5 * ed - c6 * ee) + eb * (c7 + dp * (-c8 + dp * c4))
                 + dp * ea * (c2 - dp * c3) - c2 * dp * ec)
            / (ave * std::sqrt(ave));
}

/// K(m) by the arithmetic-geometric mean, 0 <= m < 1.
inline double complete_k(double m)
{
    if (!(m >= 0.0 && m < 1.0)) {
        std::ostringstream os;
        os << "complete_k: parameter m = " << m << " outside [0, 1)";
        throw DomainError(os.str());
    }
    double a = 1.0;
    double g = std::sqrt(1.0 - m);
    for (int it = 0; it < 64 && std::abs(a - g) > 4.0 * std::numeric_limits<double>::epsilon() * a; ++it) {
        const double next_a = 0.5 * (a + g);
        g = std::sqrt(a * g);
        a = next_a;
    }
    return std::numbers::pi / (a + g);
}

inline void check_pi_domain(double n, double m)
{
    if (!(m >= 0.0 && m < 1.0) || !(n < 1.0) || !std::isfinite(n)) {
        std::ostringstream os;
        os << "complete_pi: (n = " << n << ", m = " << m << ") outside n < 1, 0 <= m < 1";
        throw DomainError(os.str());
    }
}

/// (Pi(n, m) - K(m)) / n, evaluated without cancellation; finite at n = 0.
inline double complete_pi_excess(double n, double m)
{
    check_pi_domain(n, m);
    return carlson_rj(0.0, 1.0 - m, 1.0, 1.0 - n) / 3.0;
}

/// Pi(n, m) for n < 1 (negative n allowed) and 0 <= m < 1.
inline double complete_pi(double n, double m)
{
    check_pi_domain(n, m);
    if (n == 0.0)
        return complete_k(m);
    return carlson_rf(0.0, 1.0 - m, 1.0) + n * complete_pi_excess(n, m);
}

/// Translation layer for formulas that pass the modulus k (k^2 = m) as the
/// second argument, e.g. K(sqrt(s3)) and Pi(s5, sqrt(s3)). The characteristic
/// is passed through unchanged.
namespace modulus_form {

inline double K(double k) { return complete_k(k * k); }

inline double Pi(double n, double k) { return complete_pi(n, k * k); }

} // namespace modulus_form

} // namespace ellbill::elliptic

#endif
