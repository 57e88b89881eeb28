#ifndef ELLBILL_INVARIANT_SUITE_HPP
#define ELLBILL_INVARIANT_SUITE_HPP

// N-periodic orbits on their Poncelet caustic and the quantities that stay
// constant across each family: perimeter L, Joachimsthal J, sum of interior
// cosines (= J L - N), product of outer-polygon cosines, sum of kappa^{2/3}.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ellbill/billiard_dynamics.hpp"
#include "ellbill/conic_geometry.hpp"
#include "ellbill/errors.hpp"

namespace ellbill {

struct PeriodicOrbit {
    int n;
    std::vector<Vec2> vertices;
    double lambda;
    double seed_u;
    BilliardTable table;
    /// |vertex after N steps - first vertex|, before the orbit was closed.
    double closure_defect;
};

/// N vertices of the orbit starting at P2(seed_u) on the given caustic.
inline PeriodicOrbit build_periodic_orbit(const BilliardTable& table, CausticSpec caustic, int period,
                                          double seed_u)
{
    if (period < 3)
        throw DomainError("build_periodic_orbit: need N >= 3");
    const OrbitSample sample = iterate_orbit(table, caustic, seed_u, static_cast<std::size_t>(period));
    std::vector<Vec2> vertices(sample.vertex_sequence.begin(), sample.vertex_sequence.end() - 1);
    const double defect = (sample.vertex_sequence.back() - sample.vertex_sequence.front()).norm();
    if (!(defect < 1e-6)) {
        std::ostringstream os;
        os << "build_periodic_orbit: closure defect " << defect << " for N = " << period
           << " at lambda = " << caustic.lambda;
        throw NumericalError(os.str());
    }
    return {period, std::move(vertices), caustic.lambda, seed_u, table, defect};
}

inline PeriodicOrbit build_periodic_orbit(const BilliardTable& table, int period, double seed_u)
{
    return build_periodic_orbit(table, find_caustic_for_period(table, period), period, seed_u);
}

struct InvariantReport {
    double perimeter;
    double joachimsthal;
    double sum_cos;
    double product_outer_cos;
    double sum_kappa23;
    /// Named absolute defects of the identities checked on this orbit.
    std::vector<std::pair<std::string, double>> identity_residuals;

    double residual(const std::string& name) const
    {
        for (const auto& [key, value] : identity_residuals)
            if (key == name)
                return value;
        throw DomainError("InvariantReport: no residual named " + name);
    }

    // Per-vertex / per-side averages of the invariants.
    double mean_sidelength(int n) const { return perimeter / n; }
    double mean_cosine(int n) const { return joachimsthal * perimeter / n - 1.0; }
    double geomean_outer_abs(int n) const { return std::pow(std::abs(product_outer_cos), 1.0 / n); }
    double mean_kappa23(int n) const { return sum_kappa23 / n; }
};

inline InvariantReport evaluate_invariants(const PeriodicOrbit& orbit)
{
    const BilliardTable& table = orbit.table;
    const ConfocalPair pair(table, {orbit.lambda});
    const auto& v = orbit.vertices;
    const int n = orbit.n;
    auto at = [&](int i) -> const Vec2& { return v[static_cast<std::size_t>(((i % n) + n) % n)]; };

    InvariantReport report{};
    report.joachimsthal = pair.joachimsthal();
    report.product_outer_cos = 1.0;
    double max_boundary = 0.0, max_joachimsthal = 0.0, kappa_linear = 0.0;
    const double kappa_scale = std::pow(table.a() * table.b(), -4.0 / 3.0);
    for (int i = 0; i < n; ++i) {
        const Vec2& p = at(i);
        const Vec2& next = at(i + 1);
        report.perimeter += (next - p).norm();
        const double cos_i = vertex_angle_cosine(at(i - 1), p, next);
        report.sum_cos += cos_i;
        report.product_outer_cos *= pair.outer_cosine(p, next);
        report.sum_kappa23 += kappa_scale / table.normal(p).squaredNorm();
        kappa_linear += curvature23_from_cosine(pair, cos_i);

        max_boundary = std::max(max_boundary, std::abs(table.boundary_residual(p)));
        const Vec2 incoming = (p - at(i - 1)).normalized();
        max_joachimsthal = std::max(max_joachimsthal, std::abs(table.normal(p).dot(incoming) - report.joachimsthal));
    }
    // Every outer cosine carries -sign(c_a), so the product carries its N-th power.
    double outer_sign_residual = std::abs(report.product_outer_cos);
    if (pair.outer_sign() != 0) {
        const bool expect_negative = pair.outer_sign() < 0 && n % 2 == 1;
        outer_sign_residual = (report.product_outer_cos < 0.0) == expect_negative ? 0.0 : 1.0;
    }
    report.identity_residuals = {
        {"sum_cos_identity", std::abs(report.sum_cos - (report.joachimsthal * report.perimeter - n))},
        {"kappa23_linear_identity", std::abs(report.sum_kappa23 - kappa_linear)},
        {"joachimsthal", max_joachimsthal},
        {"boundary", max_boundary},
        {"closure", orbit.closure_defect},
        {"outer_sign", outer_sign_residual},
    };
    return report;
}

/// Relative spread (max - min) / max|x| of each invariant across seeds.
struct SeedSpread {
    double perimeter;
    double sum_cos;
    double product_outer_cos;
    double sum_kappa23;

    double worst() const { return std::max({perimeter, sum_cos, product_outer_cos, sum_kappa23}); }
};

inline SeedSpread seed_invariance(const BilliardTable& table, CausticSpec caustic, int period,
                                  const std::vector<double>& seeds)
{
    std::vector<InvariantReport> reports;
    reports.reserve(seeds.size());
    for (double seed : seeds)
        reports.push_back(evaluate_invariants(build_periodic_orbit(table, caustic, period, seed)));
    auto spread = [&](auto field) {
        double lo = field(reports.front()), hi = lo, scale = 0.0;
        for (const auto& r : reports) {
            lo = std::min(lo, field(r));
            hi = std::max(hi, field(r));
            scale = std::max(scale, std::abs(field(r)));
        }
        // Families whose invariant is exactly zero (e.g. sum_cos on the circle square).
        return scale < 1e-12 ? hi - lo : (hi - lo) / scale;
    };
    return {spread([](const InvariantReport& r) { return r.perimeter; }),
            spread([](const InvariantReport& r) { return r.sum_cos; }),
            spread([](const InvariantReport& r) { return r.product_outer_cos; }),
            spread([](const InvariantReport& r) { return r.sum_kappa23; })};
}

} // namespace ellbill

#endif
