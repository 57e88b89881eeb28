#ifndef ELLBILL_TOOLS_COMMANDS_HPP
#define ELLBILL_TOOLS_COMMANDS_HPP

// Subcommands of the `ellbill` tool. Each writes its data to `out`,
// diagnostics to `err`, and returns the process exit code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ellbill/ellbill.hpp"
#include "ellbill/verification.hpp"

namespace ellbill::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_verify_failed = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_numerical = 3;

inline constexpr const char* tool_version = "1.0.0";

/// Bad flag values; mapped to exit code 2.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure while computing a row; carries the offending lambda.
class RowFailure : public std::runtime_error {
public:
    RowFailure(double lambda, const std::string& what) : std::runtime_error(what), lambda(lambda) {}
    double lambda;
};

inline std::string num(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline BilliardTable make_table(double a, double b)
{
    if (!(b > 0.0) || !(a >= b))
        throw UsageError("need --a >= --b > 0");
    return {a, b};
}

// ---------------------------------------------------------------- sweep

struct SweepOptions {
    double a = 0.0;
    double b = 1.0;
    std::optional<double> lambda_min;
    std::optional<double> lambda_max;
    int steps = 200;
    std::vector<std::string> quantities{"sidelength", "cosine", "kappa23", "outer"};
    std::string method = "both";
    std::vector<int> mark_periodics;
};

struct SweepRow {
    bool periodic = false;
    int period = 0;
    double lambda = 0.0;
    double b_c = 0.0;
    std::optional<double> mean_sidelength, mean_cosine, mean_kappa23, geomean_outer_abs;
    std::optional<int> geomean_outer_sign;
    std::string method_flags;
    std::optional<double> discrete_sidelength, discrete_cosine, discrete_kappa23, discrete_outer_abs;
};

inline bool wants(const SweepOptions& o, const std::string& q)
{
    return std::find(o.quantities.begin(), o.quantities.end(), q) != o.quantities.end();
}

inline void validate(SweepOptions& o)
{
    (void)make_table(o.a, o.b);
    const double b2 = o.b * o.b;
    if (!o.lambda_min)
        o.lambda_min = 0.01 * b2;
    if (!o.lambda_max)
        o.lambda_max = 0.99 * b2;
    if (!(*o.lambda_min > 0.0))
        throw UsageError("--lambda-min must be positive");
    if (!(*o.lambda_max <= max_lambda_fraction * b2))
        throw UsageError("--lambda-max must be below b^2 (1 - 1e-9)");
    if (o.steps < 1)
        throw UsageError("--steps must be at least 1");
    if (o.steps > 1 ? !(*o.lambda_min < *o.lambda_max) : !(*o.lambda_min <= *o.lambda_max))
        throw UsageError("--lambda-min must be below --lambda-max");
    if (o.quantities.empty())
        throw UsageError("--quantities must name at least one quantity");
    for (const auto& q : o.quantities)
        if (q != "sidelength" && q != "cosine" && q != "kappa23" && q != "outer")
            throw UsageError("unknown quantity '" + q + "' (expected sidelength, cosine, kappa23, outer)");
    if (o.method != "quadrature" && o.method != "closed" && o.method != "both")
        throw UsageError("--method must be quadrature, closed or both");
    for (int n : o.mark_periodics)
        if (n < 3)
            throw UsageError("--mark-periodics entries must be >= 3");
}

/// Spatial columns of one sweep row. With method "both" the closed form is
/// reported and its relative distance to quadrature goes into method_flags.
inline void fill_spatial(const SweepOptions& o, const BilliardTable& table, SweepRow& row)
{
    const CausticSpec caustic{row.lambda};
    std::vector<std::string> flags;
    auto dual = [&](const char* tag, double floor, auto&& average) -> double {
        if (o.method == "quadrature") {
            flags.push_back(std::string(tag) + ":quadrature");
            return average(Method::quadrature).value;
        }
        const AverageResult closed = average(Method::closed_form);
        if (o.method == "closed") {
            flags.push_back(std::string(tag) + (closed.closed_form_unavailable ? ":quadrature-fallback" : ":closed"));
            return closed.value;
        }
        const double quad = average(Method::quadrature).value;
        const double gap = verification::relative_error(closed.value, quad, floor);
        if (!(gap <= 1e-9)) {
            std::ostringstream os;
            os << tag << ": closed form " << closed.value << " and quadrature " << quad << " disagree";
            throw ConsistencyError(os.str());
        }
        std::ostringstream os;
        os << tag << ":both:" << std::setprecision(2) << std::scientific << gap;
        flags.push_back(os.str());
        return closed.value;
    };
    if (wants(o, "sidelength"))
        row.mean_sidelength = dual("L", 1e-300, [&](Method m) { return mean_sidelength(table, caustic, m); });
    if (wants(o, "cosine"))
        row.mean_cosine = dual("C", verification::mean_cosine_floor, [&](Method m) { return mean_cosine(table, caustic, m); });
    if (wants(o, "kappa23")) {
        row.mean_kappa23 = mean_curvature23(table, caustic).value;
        flags.push_back("K:quadrature");
    }
    if (wants(o, "outer")) {
        const OuterGeomean g = log_geomean_outer(table, caustic);
        row.geomean_outer_abs = g.geomean_abs();
        row.geomean_outer_sign = g.sign;
        flags.push_back("G:quadrature");
    }
    std::string joined;
    for (const auto& f : flags)
        joined += (joined.empty() ? "" : ";") + f;
    row.method_flags = joined;
}

inline SweepRow compute_grid_row(const SweepOptions& o, const BilliardTable& table, double lambda)
{
    SweepRow row;
    row.lambda = lambda;
    row.b_c = std::sqrt(o.b * o.b - lambda);
    try {
        fill_spatial(o, table, row);
    } catch (const std::exception& e) {
        throw RowFailure(lambda, e.what());
    }
    return row;
}

inline SweepRow compute_periodic_row(const SweepOptions& o, const BilliardTable& table, int period)
{
    double lambda = std::nan("");
    try {
        const CausticSpec caustic = find_caustic_for_period(table, period);
        lambda = caustic.lambda;
        SweepRow row;
        row.periodic = true;
        row.period = period;
        row.lambda = lambda;
        row.b_c = std::sqrt(o.b * o.b - lambda);
        fill_spatial(o, table, row);
        const InvariantReport r = evaluate_invariants(build_periodic_orbit(table, caustic, period, 0.3));
        if (wants(o, "sidelength"))
            row.discrete_sidelength = r.mean_sidelength(period);
        if (wants(o, "cosine"))
            row.discrete_cosine = r.mean_cosine(period);
        if (wants(o, "kappa23"))
            row.discrete_kappa23 = r.mean_kappa23(period);
        if (wants(o, "outer"))
            row.discrete_outer_abs = r.geomean_outer_abs(period);
        return row;
    } catch (const std::exception& e) {
        throw RowFailure(lambda, "N = " + std::to_string(period) + ": " + e.what());
    }
}

/// Evaluates `jobs` concurrently, returning results in input order.
template <class T, class Job>
std::vector<T> run_ordered(std::size_t count, Job job)
{
    const std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    std::vector<T> out;
    out.reserve(count);
    for (std::size_t start = 0; start < count; start += workers) {
        std::vector<std::future<T>> batch;
        for (std::size_t i = start; i < std::min(count, start + workers); ++i)
            batch.push_back(std::async(std::launch::async, job, i));
        for (auto& f : batch)
            out.push_back(f.get());
    }
    return out;
}

inline void write_sweep_csv(std::ostream& out, const SweepOptions& o, const std::vector<SweepRow>& rows)
{
    auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
    out << "# ellbill sweep " << tool_version << "\n";
    out << "# flags: --a " << num(o.a) << " --b " << num(o.b) << " --lambda-min " << num(*o.lambda_min)
        << " --lambda-max " << num(*o.lambda_max) << " --steps " << o.steps << " --quantities ";
    for (std::size_t i = 0; i < o.quantities.size(); ++i)
        out << (i ? "," : "") << o.quantities[i];
    out << " --method " << o.method << " --mark-periodics ";
    for (std::size_t i = 0; i < o.mark_periodics.size(); ++i)
        out << (i ? "," : "") << o.mark_periodics[i];
    out << "\n# tolerances: quadrature_abs=1e-12 dual_route_rel=1e-9 periodic_closure=1e-10\n";
    out << "row_type,N,lambda,one_minus_lambda,b_c,mean_sidelength,mean_cosine,mean_kappa23,"
           "geomean_outer_abs,geomean_outer_sign,method_flags,discrete_sidelength,discrete_cosine,"
           "discrete_kappa23,discrete_outer_abs\n";
    for (const SweepRow& r : rows) {
        out << (r.periodic ? "PERIODIC" : "DATA") << ',' << (r.periodic ? std::to_string(r.period) : "") << ','
            << num(r.lambda) << ',' << num(1.0 - r.lambda) << ',' << num(r.b_c) << ',' << opt(r.mean_sidelength)
            << ',' << opt(r.mean_cosine) << ',' << opt(r.mean_kappa23) << ',' << opt(r.geomean_outer_abs) << ','
            << (r.geomean_outer_sign ? std::to_string(*r.geomean_outer_sign) : "") << ',' << r.method_flags << ','
            << opt(r.discrete_sidelength) << ',' << opt(r.discrete_cosine) << ',' << opt(r.discrete_kappa23) << ','
            << opt(r.discrete_outer_abs) << '\n';
    }
}

inline int cmd_sweep(SweepOptions o, std::ostream& out, std::ostream& err)
{
    try {
        validate(o);
    } catch (const UsageError& e) {
        err << "ellbill sweep: " << e.what() << "\n";
        return exit_usage;
    }
    const BilliardTable table(o.a, o.b);
    const double lo = *o.lambda_min, hi = *o.lambda_max;
    try {
        std::vector<SweepRow> rows = run_ordered<SweepRow>(static_cast<std::size_t>(o.steps), [&](std::size_t i) {
            const double lambda = o.steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (o.steps - 1);
            return compute_grid_row(o, table, lambda);
        });
        std::vector<SweepRow> marked = run_ordered<SweepRow>(
            o.mark_periodics.size(), [&](std::size_t i) { return compute_periodic_row(o, table, o.mark_periodics[i]); });
        rows.insert(rows.end(), marked.begin(), marked.end());
        std::stable_sort(rows.begin(), rows.end(),
                         [](const SweepRow& x, const SweepRow& y) { return x.lambda < y.lambda; });
        write_sweep_csv(out, o, rows);
    } catch (const RowFailure& e) {
        err << "ellbill sweep: numerical failure at lambda = " << num(e.lambda) << ": " << e.what() << "\n";
        return exit_numerical;
    }
    return exit_ok;
}

// ------------------------------------------------------------- periodic

struct PeriodicOptions {
    double a = 0.0;
    double b = 1.0;
    std::vector<int> periods;
};

inline int cmd_periodic(const PeriodicOptions& o, std::ostream& out, std::ostream& err)
{
    std::optional<BilliardTable> table;
    try {
        table = make_table(o.a, o.b);
        if (o.periods.empty())
            throw UsageError("--n must name at least one period");
        for (int n : o.periods)
            if (n < 3)
                throw UsageError("--n entries must be >= 3");
    } catch (const UsageError& e) {
        err << "ellbill periodic: " << e.what() << "\n";
        return exit_usage;
    }

    out << "# ellbill periodic " << tool_version << " --a " << num(o.a) << " --b " << num(o.b) << "\n";
    out << "N,status,lambda,b_c,perimeter,joachimsthal,sum_cos,product_outer_cos,sum_kappa23,closure_defect,"
           "sum_cos_residual,kappa23_residual,joachimsthal_residual,reason\n";
    for (int n : o.periods) {
        try {
            const CausticSpec caustic = find_caustic_for_period(*table, n);
            const PeriodicOrbit orbit = build_periodic_orbit(*table, caustic, n, 0.3);
            const InvariantReport r = evaluate_invariants(orbit);
            out << n << ",OK," << num(caustic.lambda) << ',' << num(std::sqrt(o.b * o.b - caustic.lambda)) << ','
                << num(r.perimeter) << ',' << num(r.joachimsthal) << ',' << num(r.sum_cos) << ','
                << num(r.product_outer_cos) << ',' << num(r.sum_kappa23) << ',' << num(orbit.closure_defect) << ','
                << num(r.residual("sum_cos_identity")) << ',' << num(r.residual("kappa23_linear_identity")) << ','
                << num(r.residual("joachimsthal")) << ",\n";
        } catch (const std::exception& e) {
            std::string reason = e.what();
            std::replace(reason.begin(), reason.end(), ',', ';');
            out << n << ",SKIPPED,,,,,,,,,,,," << reason << "\n";
        }
    }
    return exit_ok;
}

// --------------------------------------------------------------- verify

struct VerifyOptions {
    std::optional<double> a;
    double b = 1.0;
    bool quick = false;
};

/// Tables checked when --a is not given.
inline std::vector<BilliardTable> default_tables() { return {{1.0, 1.0}, {1.2, 1.0}, {2.0, 1.0}, {5.0, 1.0}}; }

inline int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err)
{
    std::vector<BilliardTable> tables;
    try {
        if (o.a)
            tables.push_back(make_table(*o.a, o.b));
        else
            tables = default_tables();
    } catch (const UsageError& e) {
        err << "ellbill verify: " << e.what() << "\n";
        return exit_usage;
    }
    int failed = 0, total = 0;
    for (const BilliardTable& t : tables) {
        for (const auto& check : verification::run_battery(t, o.quick)) {
            ++total;
            failed += check.passed ? 0 : 1;
            out << (check.passed ? "PASS " : "FAIL ") << check.name << ": " << check.detail << "\n";
        }
    }
    out << (failed == 0 ? "all " : "") << total - failed << " of " << total << " checks passed\n";
    return failed == 0 ? exit_ok : exit_verify_failed;
}

// ---------------------------------------------------------------- orbit

struct OrbitOptions {
    double a = 0.0;
    double b = 1.0;
    double lambda = 0.0;
    double u0 = 0.0;
    int n = 100;
};

inline int cmd_orbit(const OrbitOptions& o, std::ostream& out, std::ostream& err)
{
    std::optional<BilliardTable> table;
    try {
        table = make_table(o.a, o.b);
        if (!(o.lambda > 0.0 && o.lambda < o.b * o.b))
            throw UsageError("--lambda must satisfy 0 < lambda < b^2");
        if (o.n < 1)
            throw UsageError("--n must be at least 1");
    } catch (const UsageError& e) {
        err << "ellbill orbit: " << e.what() << "\n";
        return exit_usage;
    }
    try {
        const CausticSpec caustic{o.lambda};
        const OrbitSample orbit = iterate_orbit(*table, caustic, o.u0, static_cast<std::size_t>(o.n));
        const double j = joachimsthal(*table, caustic);
        out << "# ellbill orbit " << tool_version << " --a " << num(o.a) << " --b " << num(o.b) << " --lambda "
            << num(o.lambda) << " --u0 " << num(o.u0) << " --n " << o.n << "\n";
        out << "index,x,y,u_lifted,joachimsthal_residual\n";
        const auto& v = orbit.vertex_sequence;
        for (std::size_t k = 0; k < v.size(); ++k) {
            // Incoming direction at vertex k; the first vertex uses its outgoing
            // chord, whose normal component has the opposite sign.
            const double jk = k == 0 ? -table->normal(v[0]).dot((v[1] - v[0]).normalized())
                                     : table->normal(v[k]).dot((v[k] - v[k - 1]).normalized());
            out << k << ',' << num(v[k].x()) << ',' << num(v[k].y()) << ',' << num(orbit.u_sequence[k]) << ','
                << num(std::abs(jk - j)) << '\n';
        }
    } catch (const std::exception& e) {
        err << "ellbill orbit: numerical failure at lambda = " << num(o.lambda) << ": " << e.what() << "\n";
        return exit_numerical;
    }
    return exit_ok;
}

} // namespace ellbill::cli

#endif
