#ifndef ELLBILL_BILLIARD_DYNAMICS_HPP
#define ELLBILL_BILLIARD_DYNAMICS_HPP

// The billiard map in caustic coordinates, orbit iteration with a continuous
// angular lift, rotation numbers, periodic caustics and time averages.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string_view>
#include <vector>

#include "ellbill/average_result.hpp"
#include "ellbill/conic_geometry.hpp"
#include "ellbill/errors.hpp"

namespace ellbill {

inline double next_tangency(const BilliardTable& table, CausticSpec caustic, double u)
{
    return ConfocalPair(table, caustic).next_tangency(u);
}

inline double prev_tangency(const BilliardTable& table, CausticSpec caustic, double u)
{
    return ConfocalPair(table, caustic).prev_tangency(u);
}

/// A finite piece of trajectory. Chord k is tangent to the caustic at
/// u_sequence[k] and runs from vertex k to vertex k + 1; vertex k is P2 of
/// chord k. The lift is strictly increasing.
struct OrbitSample {
    std::vector<double> u_sequence;
    std::vector<Vec2> vertex_sequence;
    BilliardTable table;
    CausticSpec caustic;
};

/// n steps of the billiard map from u0: n + 1 tangency parameters and n + 1 vertices.
inline OrbitSample iterate_orbit(const BilliardTable& table, CausticSpec caustic, double u0, std::size_t n)
{
    if (n < 1)
        throw DomainError("iterate_orbit: need n >= 1");
    const ConfocalPair pair(table, caustic);
    OrbitSample orbit{{}, {}, table, caustic};
    orbit.u_sequence.reserve(n + 1);
    orbit.vertex_sequence.reserve(n + 1);
    double u = u0;
    orbit.u_sequence.push_back(u);
    orbit.vertex_sequence.push_back(pair.chord(u).p2);
    for (std::size_t k = 0; k < n; ++k) {
        u = pair.next_tangency(u);
        orbit.u_sequence.push_back(u);
        orbit.vertex_sequence.push_back(pair.chord(u).p2);
    }
    return orbit;
}

/// Lift advance after `steps` applications of the map, starting from u0.
inline double lift_after(const ConfocalPair& pair, double u0, std::size_t steps)
{
    double u = u0;
    for (std::size_t k = 0; k < steps; ++k)
        u = pair.next_tangency(u);
    return u - u0;
}

struct RotationEstimate {
    double rho;
    std::size_t steps;
    /// Distance of the total lift from the nearest multiple of 2 pi.
    double residual;
};

inline RotationEstimate rotation_number(const BilliardTable& table, CausticSpec caustic, std::size_t n,
                                        double u0 = 0.0)
{
    if (n < 1000)
        throw DomainError("rotation_number: need n >= 1000 steps");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double lift = lift_after(ConfocalPair(table, caustic), u0, n);
    return {lift / (two_pi * static_cast<double>(n)), n, std::abs(std::remainder(lift, two_pi))};
}

/// N-step closure defect lift(N) - 2 pi from u0. Its sign is the sign of
/// rho - 1/N whatever u0 is, and it vanishes for every u0 on the N-periodic caustic.
inline double closure_defect(const BilliardTable& table, CausticSpec caustic, int period, double u0 = 0.0)
{
    return lift_after(ConfocalPair(table, caustic), u0, static_cast<std::size_t>(period))
        - 2.0 * std::numbers::pi;
}

/// Smallest and largest caustic parameters searched for periodic caustics.
inline double min_search_lambda(const BilliardTable& table) { return 1e-14 * table.b() * table.b(); }
inline double max_search_lambda(const BilliardTable& table) { return (1.0 - 1e-12) * table.b() * table.b(); }

/// Caustic carrying the winding-number-one N-periodic family.
inline CausticSpec find_caustic_for_period(const BilliardTable& table, int period)
{
    if (period < 3)
        throw DomainError("find_caustic_for_period: need N >= 3");

    double lo = min_search_lambda(table);
    double hi = max_search_lambda(table);
    const double f_lo = closure_defect(table, {lo}, period);
    const double f_hi = closure_defect(table, {hi}, period);
    if (!(f_lo < 0.0 && f_hi > 0.0)) {
        std::ostringstream os;
        os << "find_caustic_for_period: cannot bracket N = " << period << " (defect " << f_lo << " at lambda = "
           << lo << ", " << f_hi << " at lambda = " << hi << ")";
        throw NumericalError(os.str());
    }
    // Bisection to adjacent doubles; the defect is monotone in lambda.
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        (closure_defect(table, {mid}, period) < 0.0 ? lo : hi) = mid;
    }
    const double f_at_lo = std::abs(closure_defect(table, {lo}, period));
    const double f_at_hi = std::abs(closure_defect(table, {hi}, period));
    const double lambda = f_at_lo <= f_at_hi ? lo : hi;
    const double defect = std::min(f_at_lo, f_at_hi);
    if (!(defect < 1e-10)) {
        std::ostringstream os;
        os << "find_caustic_for_period: closure defect " << defect << " at lambda = " << lambda << " for N = "
           << period;
        throw NumericalError(os.str());
    }
    return {lambda};
}

enum class Quantity { sidelength, interior_cosine, curvature23, log_abs_outer_cosine };

inline constexpr std::array<Quantity, 4> all_quantities{Quantity::sidelength, Quantity::interior_cosine,
                                                        Quantity::curvature23, Quantity::log_abs_outer_cosine};

inline std::string_view to_string(Quantity q)
{
    switch (q) {
    case Quantity::sidelength: return "sidelength";
    case Quantity::interior_cosine: return "interior_cosine";
    case Quantity::curvature23: return "curvature23";
    case Quantity::log_abs_outer_cosine: return "log_abs_outer_cosine";
    }
    return "unknown";
}

/// Time averages of all four per-chord quantities along one orbit,
/// indexed like `all_quantities`.
///
/// Every value is read off the orbit's own vertices: side lengths as vertex
/// distances, interior cosines as vertex angles between neighbouring chords,
/// outer cosines from consecutive boundary normals, kappa^{2/3} from the
/// boundary curvature. Chord quantities that live on vertices are the mean
/// over the chord's two endpoints.
inline std::array<AverageResult, 4> time_averages(const BilliardTable& table, CausticSpec caustic, std::size_t n,
                                                  double u0 = 0.1)
{
    if (n < 1000)
        throw DomainError("time_average: need n >= 1000 chords");
    const ConfocalPair pair(table, caustic);
    const double kappa_scale = std::pow(table.a() * table.b(), -4.0 / 3.0);
    auto kappa23 = [&](const Vec2& p) { return kappa_scale / table.normal(p).squaredNorm(); };

    // Sliding window of four consecutive vertices: chord k spans w[1] -> w[2].
    double u = u0;
    const Chord first = pair.chord(u);
    std::array<Vec2, 4> w{pair.chord(pair.prev_tangency(u)).p2, first.p2, first.p1, Vec2::Zero()};
    u = pair.next_tangency(u);
    w[3] = pair.chord(u).p1;

    std::array<double, 4> sum{}, half_sum{};
    const std::size_t half = n / 2;
    for (std::size_t k = 0; k < n; ++k) {
        const double cos_a = vertex_angle_cosine(w[0], w[1], w[2]);
        const double cos_b = vertex_angle_cosine(w[1], w[2], w[3]);
        sum[0] += (w[2] - w[1]).norm();
        sum[1] += 0.5 * (cos_a + cos_b);
        sum[2] += 0.5 * (kappa23(w[1]) + kappa23(w[2]));
        sum[3] += std::log(std::abs(pair.outer_cosine(w[1], w[2])));
        if (k + 1 == half)
            half_sum = sum;
        u = pair.next_tangency(u);
        w = {w[1], w[2], w[3], pair.chord(u).p1};
    }

    std::array<AverageResult, 4> out;
    for (std::size_t i = 0; i < 4; ++i) {
        const double mean = sum[i] / static_cast<double>(n);
        const double half_mean = half_sum[i] / static_cast<double>(half);
        out[i] = {mean, Method::time_average, std::abs(mean - half_mean), caustic.lambda, false};
    }
    return out;
}

inline AverageResult time_average(const BilliardTable& table, CausticSpec caustic, Quantity quantity,
                                  std::size_t n, double u0 = 0.1)
{
    return time_averages(table, caustic, n, u0)[static_cast<std::size_t>(quantity)];
}

} // namespace ellbill

#endif
