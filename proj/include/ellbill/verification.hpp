#ifndef ELLBILL_VERIFICATION_HPP
#define ELLBILL_VERIFICATION_HPP

// Self-check battery run by `ellbill verify`: dual-route closed forms,
// ergodic (time vs space) agreement, N-periodic matching, invariant
// identities, the 2a limit, circle exactness and the outer-cosine sign change.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ellbill/billiard_dynamics.hpp"
#include "ellbill/invariant_suite.hpp"
#include "ellbill/spatial_averages.hpp"

namespace ellbill::verification {

struct CheckResult {
    std::string name;
    bool passed;
    std::string detail;
};

struct Tolerances {
    double dual_route = 1e-9;       // relative
    double ergodic = 5e-3;          // relative
    double periodic_match = 1e-6;   // relative for L, absolute for C and geomean
    double sum_cos_identity = 1e-9; // absolute
    double seed_spread = 1e-8;      // relative
    double limit_2a = 1e-2;         // relative
    double circle_exact = 1e-12;    // absolute
    double outer_closed_form = 1e-9;
};

/// Caustic parameters, as fractions of b^2, used for time-vs-space checks.
/// They stay clear of lambda_4 = a^2 b^2 / (a^2 + b^2) for the default
/// tables, where the mean cosine passes through zero.
inline const std::vector<double>& ergodic_lambda_fractions()
{
    static const std::vector<double> fractions{0.13, 0.29, 0.43, 0.67, 0.89};
    return fractions;
}

inline double relative_error(double value, double reference)
{
    return std::abs(value - reference) / std::abs(reference);
}

/// Relative error whose denominator never drops below `floor`, for
/// quantities that cross zero.
inline double relative_error(double value, double reference, double floor)
{
    return std::abs(value - reference) / std::max(std::abs(reference), floor);
}

/// Denominator floor for the mean cosine, which vanishes at lambda_4.
inline constexpr double mean_cosine_floor = 1e-3;

namespace detail {

inline std::string describe(const BilliardTable& t)
{
    std::ostringstream os;
    os << "a=" << t.a() << " b=" << t.b();
    return os.str();
}

inline std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

} // namespace detail

inline CheckResult check_dual_route(const BilliardTable& table, const Tolerances& tol = {})
{
    const double b2 = table.b() * table.b();
    double worst = 0.0;
    std::string where;
    for (int i = 1; i <= 19; ++i) {
        const CausticSpec caustic{0.05 * i * b2};
        const ConfocalPair pair(table, caustic);
        const double norm_q = normalization_quadrature(pair).value;
        const double errs[] = {
            relative_error(normalization_closed_form(pair), norm_q),
            relative_error(mean_sidelength(table, caustic, Method::closed_form).value,
                           mean_sidelength(table, caustic, Method::quadrature).value),
            relative_error(mean_cosine(table, caustic, Method::closed_form).value,
                           mean_cosine(table, caustic, Method::quadrature).value, mean_cosine_floor),
        };
        for (double e : errs)
            if (!(e <= worst)) {
                worst = e;
                where = "lambda=" + std::to_string(caustic.lambda);
            }
    }
    return {"dual-route closed form vs quadrature [" + detail::describe(table) + "]", worst <= tol.dual_route,
            "worst relative defect " + detail::fmt(worst) + " at " + where};
}

inline CheckResult check_outer_closed_form(const BilliardTable& table, const Tolerances& tol = {})
{
    const double b2 = table.b() * table.b();
    double worst = 0.0;
    for (int i = 1; i <= 19; ++i) {
        const ConfocalPair pair(table, {0.05 * i * b2});
        for (int k = 0; k < 1000; ++k) {
            const double u = 2.0 * std::numbers::pi * k / 1000.0;
            worst = std::max(worst, std::abs(pair.outer_cosine(u) - pair.outer_cosine_closed_form(u)));
        }
    }
    return {"outer cosine closed form vs normals [" + detail::describe(table) + "]", worst <= tol.outer_closed_form,
            "max defect " + detail::fmt(worst)};
}

inline CheckResult check_ergodic(const BilliardTable& table, std::size_t bounces, const Tolerances& tol = {})
{
    const double b2 = table.b() * table.b();
    std::vector<std::future<double>> jobs;
    for (double fraction : ergodic_lambda_fractions()) {
        jobs.push_back(std::async(std::launch::async, [&table, bounces, caustic = CausticSpec{fraction * b2}] {
            const auto t = time_averages(table, caustic, bounces);
            const double spatial[] = {
                mean_sidelength(table, caustic, Method::quadrature).value,
                mean_cosine(table, caustic, Method::quadrature).value,
                mean_curvature23(table, caustic).value,
                log_geomean_outer(table, caustic).log_mean,
            };
            double worst = 0.0;
            for (std::size_t q = 0; q < 4; ++q)
                worst = std::max(worst, relative_error(t[q].value, spatial[q]));
            return worst;
        }));
    }
    double worst = 0.0;
    for (auto& j : jobs)
        worst = std::max(worst, j.get());
    return {"ergodic time vs space averages, " + std::to_string(bounces) + " bounces [" + detail::describe(table) + "]",
            worst <= tol.ergodic, "worst relative defect " + detail::fmt(worst)};
}

inline CheckResult check_periodic_matching(const BilliardTable& table, const Tolerances& tol = {})
{
    double worst_l = 0.0, worst_c = 0.0, worst_g = 0.0, worst_k = 0.0;
    for (int n = 3; n <= 7; ++n) {
        const CausticSpec caustic = find_caustic_for_period(table, n);
        const InvariantReport r = evaluate_invariants(build_periodic_orbit(table, caustic, n, 0.3));
        const double l_bar = mean_sidelength(table, caustic).value;
        worst_l = std::max(worst_l, relative_error(r.mean_sidelength(n), l_bar));
        worst_c = std::max(worst_c, std::abs(r.mean_cosine(n) - mean_cosine(table, caustic).value));
        worst_g = std::max(worst_g, std::abs(r.geomean_outer_abs(n) - log_geomean_outer(table, caustic).geomean_abs()));
        worst_k = std::max(worst_k, relative_error(r.mean_kappa23(n), mean_curvature23(table, caustic).value));
    }
    const bool ok = worst_l <= tol.periodic_match && worst_c <= tol.periodic_match
        && worst_g <= tol.periodic_match && worst_k <= tol.periodic_match;
    return {"N-periodic averages match spatial averages, N=3..7 [" + detail::describe(table) + "]", ok,
            "L/N " + detail::fmt(worst_l) + ", JL/N-1 " + detail::fmt(worst_c) + ", geomean " + detail::fmt(worst_g)
                + ", kappa23 " + detail::fmt(worst_k)};
}

inline CheckResult check_identities(const BilliardTable& table, const Tolerances& tol = {})
{
    std::vector<double> seeds;
    for (int i = 0; i < 10; ++i)
        seeds.push_back(0.1 + 0.61 * i);
    double worst_identity = 0.0, worst_spread = 0.0;
    for (int n = 3; n <= 7; ++n) {
        const CausticSpec caustic = find_caustic_for_period(table, n);
        for (double seed : seeds) {
            const InvariantReport r = evaluate_invariants(build_periodic_orbit(table, caustic, n, seed));
            worst_identity = std::max(worst_identity, r.residual("sum_cos_identity"));
        }
        worst_spread = std::max(worst_spread, seed_invariance(table, caustic, n, seeds).worst());
    }
    return {"sum cos = JL - N and seed invariance, N=3..7 [" + detail::describe(table) + "]",
            worst_identity <= tol.sum_cos_identity && worst_spread <= tol.seed_spread,
            "identity residual " + detail::fmt(worst_identity) + ", seed spread " + detail::fmt(worst_spread)};
}

inline CheckResult check_limit_2a(const BilliardTable& table, const Tolerances& tol = {})
{
    const double b2 = table.b() * table.b();
    const double l_bar = mean_sidelength(table, {b2 * (1.0 - 1e-6)}).value;
    const double err = relative_error(l_bar, 2.0 * table.a());
    return {"mean sidelength within 1% of 2a at lambda = b^2 (1 - 1e-6) [" + detail::describe(table) + "]",
            err <= tol.limit_2a, "L_bar = " + std::to_string(l_bar) + ", relative gap " + detail::fmt(err)};
}

/// L_bar increases towards 2a as lambda -> b^2, with a gap that shrinks
/// only like 1 / log(1 / b_c).
inline CheckResult check_limit_trend(const BilliardTable& table)
{
    const double b2 = table.b() * table.b();
    const double two_a = 2.0 * table.a();
    double previous = 0.0;
    bool ok = true;
    std::ostringstream os;
    os << "relative gap to 2a:";
    for (double eps : {1e-1, 1e-3, 1e-6, 1e-9}) {
        const double l_bar = mean_sidelength(table, {b2 * (1.0 - eps)}).value;
        ok = ok && l_bar > previous && l_bar < two_a;
        previous = l_bar;
        os << " " << detail::fmt(relative_error(l_bar, two_a)) << " (1-" << eps << ")";
    }
    return {"mean sidelength increases towards 2a as lambda -> b^2 [" + detail::describe(table) + "]", ok, os.str()};
}

inline CheckResult check_circle(const BilliardTable& table, const Tolerances& tol = {})
{
    const double a = table.a(), b2 = a * a;
    double worst = 0.0;
    for (int i = 1; i <= 19; ++i) {
        const double lambda = 0.05 * i * b2;
        const CausticSpec caustic{lambda};
        // Circle of radius a: chord 2 sqrt(lambda), vertex cosine 2 lambda / a^2 - 1,
        // outer cosine 2 lambda / a^2 - 1 as well (outer polygon angle = pi - central angle).
        const double expect_cos = 2.0 * lambda / b2 - 1.0;
        worst = std::max(worst, std::abs(mean_sidelength(table, caustic).value - 2.0 * std::sqrt(lambda)));
        worst = std::max(worst, std::abs(mean_sidelength(table, caustic, Method::quadrature).value - 2.0 * std::sqrt(lambda)));
        worst = std::max(worst, std::abs(mean_cosine(table, caustic).value - expect_cos));
        worst = std::max(worst, std::abs(mean_cosine(table, caustic, Method::quadrature).value - expect_cos));
        const OuterGeomean g = log_geomean_outer(table, caustic);
        const double ca = a * a * a * a - 2.0 * a * a * lambda;
        const int expect_sign = ca > 0.0 ? -1 : (ca < 0.0 ? 1 : 0);
        worst = std::max(worst, std::abs(g.geomean_abs() - std::abs(expect_cos)));
        if (g.sign != expect_sign)
            worst = std::max(worst, 1.0);
    }
    for (int n = 3; n <= 7; ++n) {
        const double expect = std::pow(std::sin(std::numbers::pi / n), 2) * b2;
        worst = std::max(worst, std::abs(find_caustic_for_period(table, n).lambda - expect));
    }
    return {"circle exactness [" + detail::describe(table) + "]", worst <= tol.circle_exact,
            "worst defect " + detail::fmt(worst)};
}

inline CheckResult check_sign_change(const BilliardTable& table)
{
    const double a2 = table.a() * table.a(), b2 = table.b() * table.b();
    const double lambda_star = a2 * b2 / (a2 + b2);
    bool ok = log_geomean_outer(table, {lambda_star}).sign == 0;
    double prev_below = 1.0, prev_above = 1.0;
    std::ostringstream detail;
    for (double d : {1e-2, 1e-4, 1e-6}) {
        const OuterGeomean below = log_geomean_outer(table, {lambda_star * (1.0 - d)});
        const OuterGeomean above = log_geomean_outer(table, {lambda_star * (1.0 + d)});
        ok = ok && below.sign == -1 && above.sign == 1;
        ok = ok && below.geomean_abs() < prev_below && above.geomean_abs() < prev_above;
        prev_below = below.geomean_abs();
        prev_above = above.geomean_abs();
    }
    ok = ok && prev_below < 1e-4 && prev_above < 1e-4;
    detail << "lambda* = " << lambda_star << ", geomean at 1e-6 offsets " << detail::fmt(prev_below) << " / "
           << detail::fmt(prev_above);
    return {"outer geomean sign flips at c_a = 0 [" + detail::describe(table) + "]", ok, detail.str()};
}

/// Full battery for one table. `quick` shortens the ergodic orbits 100x.
inline std::vector<CheckResult> run_battery(const BilliardTable& table, bool quick, const Tolerances& tol = {})
{
    const bool circle = table.a() == table.b();
    const std::size_t bounces = quick ? 10'000 : 1'000'000;
    std::vector<CheckResult> out;
    auto guarded = [&](auto&& check, const std::string& name) {
        try {
            out.push_back(check());
        } catch (const std::exception& e) {
            out.push_back({name + " [" + detail::describe(table) + "]", false, std::string("exception: ") + e.what()});
        }
    };
    if (circle)
        guarded([&] { return check_circle(table, tol); }, "circle exactness");
    guarded([&] { return check_dual_route(table, tol); }, "dual-route");
    guarded([&] { return check_outer_closed_form(table, tol); }, "outer closed form");
    guarded([&] { return check_ergodic(table, bounces, tol); }, "ergodic");
    guarded([&] { return check_periodic_matching(table, tol); }, "periodic matching");
    guarded([&] { return check_identities(table, tol); }, "identities");
    guarded([&] { return check_limit_trend(table); }, "limit trend");
    guarded([&] { return check_sign_change(table); }, "sign change");
    return out;
}

} // namespace ellbill::verification

#endif
