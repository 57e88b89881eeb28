#ifndef ELLBILL_SPATIAL_AVERAGES_HPP
#define ELLBILL_SPATIAL_AVERAGES_HPP

// Averages over the caustic weighted by the invariant density
//
//   rho(u) = kappa_c^{2/3} ds/du = (a_c b_c)^{2/3} / sqrt(a_c^2 - c^2 cos^2 u),
//
//   g_bar = int_0^{2pi} g(u) rho(u) du / int_0^{2pi} rho(u) du,
//
// where g is a per-chord quantity and u the tangency parameter. For an
// aperiodic trajectory this equals the long-run mean of g over its chords.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ellbill/average_result.hpp"
#include "ellbill/conic_geometry.hpp"
#include "ellbill/elliptic_integrals.hpp"
#include "ellbill/errors.hpp"

namespace ellbill {

struct QuadratureResult {
    double value;
    /// |T(2n) - T(n)| at the last doubling.
    double err;
    std::size_t nodes;
};

/// Trapezoid rule on [0, 2 pi) with node doubling from 16 up to `max_nodes`,
/// stopping once successive estimates differ by less than `tol` (times the
/// magnitude of the estimate once that exceeds one). For smooth
/// periodic integrands the error decays geometrically in the node count.
template <class F>
QuadratureResult periodic_quadrature(F&& f, double tol = 1e-12, std::size_t max_nodes = std::size_t{1} << 20)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::size_t n = 16;

    // Neumaier-compensated running sum of all samples taken so far.
    double sum = 0.0, comp = 0.0;
    auto add = [&](double v) {
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "periodic_quadrature: non-finite integrand value " << v;
            throw NumericalError(os.str());
        }
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    };
    for (std::size_t i = 0; i < n; ++i)
        add(f(two_pi * static_cast<double>(i) / static_cast<double>(n)));
    double estimate = two_pi * (sum + comp) / static_cast<double>(n);

    double defect = std::numeric_limits<double>::infinity();
    while (n < max_nodes) {
        for (std::size_t i = 0; i < n; ++i)
            add(f(two_pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n)));
        n *= 2;
        const double refined = two_pi * (sum + comp) / static_cast<double>(n);
        defect = std::abs(refined - estimate);
        estimate = refined;
        if (defect < tol * std::max(1.0, std::abs(refined)))
            return {estimate, defect, n};
    }
    std::ostringstream os;
    os << "periodic_quadrature: no convergence with " << n << " nodes (defect " << defect << ", tol " << tol << ")";
    throw NumericalError(os.str());
}

/// Largest caustic parameter, as a fraction of b^2, accepted by the averages.
inline constexpr double max_lambda_fraction = 1.0 - 1e-9;

inline ConfocalPair averaging_pair(const BilliardTable& table, CausticSpec caustic)
{
    const double limit = max_lambda_fraction * table.b() * table.b();
    if (caustic.lambda > limit) {
        std::ostringstream os;
        os << "caustic parameter lambda = " << caustic.lambda << " exceeds b^2 (1 - 1e-9) = " << limit;
        throw DomainError(os.str());
    }
    return ConfocalPair(table, caustic);
}

/// Auxiliary constants of the closed forms. s3 and s5 enter K and Pi in the
/// parameter convention (the modulus is sqrt(s3)).
struct ClosedFormInputs {
    double s1;
    double s2;
    double s3;
    double s5;
    /// 2ab sqrt(lambda) (a^2 - lambda)^{1/3} (b^2 - lambda)^{1/3}
    double c1;
    std::vector<std::string> violations;

    bool valid() const { return violations.empty(); }
};

inline ClosedFormInputs closed_form_inputs(const ConfocalPair& pair)
{
    const RationalCosine rc = rational_cosine(pair);
    ClosedFormInputs in{};
    in.s3 = pair.c2() / pair.ac2();
    in.s5 = pair.lambda() * in.s3 / (pair.b() * pair.b());
    in.s1 = rc.s1();
    in.s2 = rc.s2();
    in.c1 = 2.0 * pair.a() * pair.b() * std::sqrt(pair.lambda()) * std::cbrt(pair.ac2()) * std::cbrt(pair.bc2());
    auto check = [&](bool ok, const char* what, double v) {
        if (!ok) {
            std::ostringstream os;
            os << what << " (value " << v << ")";
            in.violations.push_back(os.str());
        }
    };
    check(in.s3 >= 0.0 && in.s3 < 1.0, "s3 outside [0, 1)", in.s3);
    check(in.s5 < 1.0, "s5 >= 1", in.s5);
    check(in.s2 < 1.0, "s2 >= 1", in.s2);
    return in;
}

inline ClosedFormInputs closed_form_inputs(const BilliardTable& table, CausticSpec caustic)
{
    return closed_form_inputs(ConfocalPair(table, caustic));
}

inline QuadratureResult normalization_quadrature(const ConfocalPair& pair, double tol = 1e-12)
{
    return periodic_quadrature([&](double u) { return pair.measure_density(u); }, tol);
}

/// int_0^{2pi} rho du = 4 (a^2 - lambda)^{1/3} (b^2 - lambda)^{1/3} K(s3) / sqrt(a^2 - lambda).
///
/// The commonly printed version divides by sqrt(s3) instead of sqrt(a^2 - lambda),
/// which disagrees with quadrature and is singular on the circle.
inline double normalization_closed_form(const ConfocalPair& pair)
{
    const double s3 = pair.c2() / pair.ac2();
    return 4.0 * std::cbrt(pair.ac2()) * std::cbrt(pair.bc2()) * elliptic::complete_k(s3) / pair.ac();
}

/// Total invariant mass of the caustic, checked by quadrature.
inline double normalization(const BilliardTable& table, CausticSpec caustic)
{
    const ConfocalPair pair = averaging_pair(table, caustic);
    const double closed = normalization_closed_form(pair);
    const double quad = normalization_quadrature(pair).value;
    if (!(std::abs(closed - quad) <= 1e-9 * std::abs(closed))) {
        std::ostringstream os;
        os << "normalization: closed form " << closed << " and quadrature " << quad
           << " disagree at lambda = " << caustic.lambda;
        throw ConsistencyError(os.str());
    }
    return closed;
}

namespace detail {

template <class G>
AverageResult weighted_average(const ConfocalPair& pair, G&& g, double tol = 1e-12)
{
    const QuadratureResult den = normalization_quadrature(pair, tol);
    const QuadratureResult num =
        periodic_quadrature([&](double u) { return g(u) * pair.measure_density(u); }, tol);
    const double value = num.value / den.value;
    const double err = (num.err + std::abs(value) * den.err) / den.value;
    return {value, Method::quadrature, err, pair.lambda(), false};
}

} // namespace detail

/// Mean chord length.
///
/// Closed form:
///   L_bar = 2a / (sqrt(lambda) K(s3)) ((lambda - b^2) Pi(s5, s3) + b^2 K(s3)).
inline AverageResult mean_sidelength(const BilliardTable& table, CausticSpec caustic,
                                     Method method = Method::closed_form)
{
    const ConfocalPair pair = averaging_pair(table, caustic);
    if (method == Method::quadrature)
        return detail::weighted_average(pair, [&](double u) { return pair.chord_length(u); });
    if (method != Method::closed_form)
        throw DomainError("mean_sidelength: method must be quadrature or closed_form");

    const ClosedFormInputs in = closed_form_inputs(pair);
    if (!(in.s5 < 1.0) || !(in.s3 < 1.0)) {
        std::ostringstream os;
        os << "mean_sidelength: need s3, s5 < 1 for the closed form, got s3 = " << in.s3 << ", s5 = " << in.s5;
        throw NumericalError(os.str());
    }
    const double b2 = table.b() * table.b();
    const double lambda = caustic.lambda;
    // K(sqrt(s3)) and Pi(s5, sqrt(s3)) in modulus form.
    const double k = elliptic::modulus_form::K(std::sqrt(in.s3));
    const double pi = elliptic::modulus_form::Pi(in.s5, std::sqrt(in.s3));
    const double value = 2.0 * table.a() / (std::sqrt(lambda) * k) * ((lambda - b2) * pi + k * b2);
    return {value, Method::closed_form, 0.0, lambda, false};
}

/// Mean interior cosine, integrating the geometric vertex cosine.
///
/// The closed form integrates the rational form (r1 + r2 cos^2 u)/(r3 (1 - s2 cos^2 u))
/// against 1/sqrt(1 - s3 cos^2 u):
///
///   C_bar = (r1 Pi(s2, s3) + r2 (Pi(s2, s3) - K(s3)) / s2) / (r3 K(s3)),
///
/// equal to (r1/r3)((s2 - s1) Pi + s1 K)/(s2 K) but finite at s2 = 0.
inline AverageResult mean_cosine(const BilliardTable& table, CausticSpec caustic,
                                 Method method = Method::closed_form)
{
    const ConfocalPair pair = averaging_pair(table, caustic);
    auto quadrature = [&] { return detail::weighted_average(pair, [&](double u) { return pair.interior_cosine(u); }); };
    if (method == Method::quadrature)
        return quadrature();
    if (method != Method::closed_form)
        throw DomainError("mean_cosine: method must be quadrature or closed_form");

    const ClosedFormInputs in = closed_form_inputs(pair);
    if (!in.valid()) {
        AverageResult r = quadrature();
        r.closed_form_unavailable = true;
        return r;
    }
    const RationalCosine rc = rational_cosine(pair);
    const double k = elliptic::complete_k(in.s3);
    const double pi = elliptic::complete_pi(in.s2, in.s3);
    const double excess = elliptic::complete_pi_excess(in.s2, in.s3);
    const double value = (rc.r1 * pi + rc.r2 * excess) / (rc.r3 * k);
    return {value, Method::closed_form, 0.0, caustic.lambda, false};
}

/// Mean of kappa^{2/3} of the billiard over the two endpoints of each chord.
inline AverageResult mean_curvature23(const BilliardTable& table, CausticSpec caustic)
{
    const ConfocalPair pair = averaging_pair(table, caustic);
    const double scale = std::pow(table.a() * table.b(), -4.0 / 3.0);
    return detail::weighted_average(pair, [&](double u) {
        const Chord ch = pair.chord(u);
        return 0.5 * scale * (1.0 / table.normal(ch.p1).squaredNorm() + 1.0 / table.normal(ch.p2).squaredNorm());
    });
}

/// Log of the geometric mean of |outer cosine|, with the common sign of the
/// outer cosines.
struct OuterGeomean {
    /// -infinity when sign == 0.
    double log_mean;
    int sign;
    double err_estimate;
    double lambda;

    double geomean_abs() const { return sign == 0 ? 0.0 : std::exp(log_mean); }
};

inline OuterGeomean log_geomean_outer(const BilliardTable& table, CausticSpec caustic)
{
    const ConfocalPair pair = averaging_pair(table, caustic);
    const int sign = pair.outer_sign();
    if (sign == 0)
        return {-std::numeric_limits<double>::infinity(), 0, 0.0, caustic.lambda};
    // The closed form keeps full relative accuracy as c_a -> 0, where the dot
    // product of the two normals is lost to cancellation.
    const AverageResult r =
        detail::weighted_average(pair, [&](double u) { return std::log(std::abs(pair.outer_cosine_closed_form(u))); });
    return {r.value, sign, r.err_estimate, caustic.lambda};
}

} // namespace ellbill

#endif
