#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv)
{
    using namespace ellbill::cli;

    CLI::App app{"Invariant-measure averages over confocal caustics of the elliptic billiard"};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1);

    SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "CSV of spatial averages over a lambda grid");
    sweep_cmd->add_option("--a", sweep.a, "billiard semi-major axis")->required();
    sweep_cmd->add_option("--b", sweep.b, "billiard semi-minor axis")->capture_default_str();
    sweep_cmd->add_option("--lambda-min", sweep.lambda_min, "smallest caustic parameter (default 0.01 b^2)");
    sweep_cmd->add_option("--lambda-max", sweep.lambda_max, "largest caustic parameter (default 0.99 b^2)");
    sweep_cmd->add_option("--steps", sweep.steps, "number of grid rows")->capture_default_str();
    sweep_cmd->add_option("--quantities", sweep.quantities, "subset of sidelength,cosine,kappa23,outer")
        ->delimiter(',');
    sweep_cmd->add_option("--method", sweep.method, "quadrature, closed or both")->capture_default_str();
    sweep_cmd->add_option("--mark-periodics", sweep.mark_periodics, "periods N whose caustics get PERIODIC rows")
        ->delimiter(',');

    PeriodicOptions periodic;
    auto* periodic_cmd = app.add_subcommand("periodic", "table of N-periodic caustics and their invariants");
    periodic_cmd->add_option("--a", periodic.a, "billiard semi-major axis")->required();
    periodic_cmd->add_option("--b", periodic.b, "billiard semi-minor axis")->capture_default_str();
    periodic_cmd->add_option("--n", periodic.periods, "period(s), comma separated")->required()->delimiter(',');

    VerifyOptions verify;
    auto* verify_cmd = app.add_subcommand("verify", "run the self-check battery");
    verify_cmd->add_option("--a", verify.a, "billiard semi-major axis (default: built-in tables)");
    verify_cmd->add_option("--b", verify.b, "billiard semi-minor axis")->capture_default_str();
    verify_cmd->add_flag("--quick", verify.quick, "shorten ergodic orbits 100x");

    OrbitOptions orbit;
    auto* orbit_cmd = app.add_subcommand("orbit", "CSV of trajectory vertices");
    orbit_cmd->add_option("--a", orbit.a, "billiard semi-major axis")->required();
    orbit_cmd->add_option("--b", orbit.b, "billiard semi-minor axis")->capture_default_str();
    orbit_cmd->add_option("--lambda", orbit.lambda, "caustic parameter")->required();
    orbit_cmd->add_option("--u0", orbit.u0, "initial tangency parameter")->capture_default_str();
    orbit_cmd->add_option("--n", orbit.n, "number of bounces")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    if (*sweep_cmd)
        return cmd_sweep(sweep, std::cout, std::cerr);
    if (*periodic_cmd)
        return cmd_periodic(periodic, std::cout, std::cerr);
    if (*verify_cmd)
        return cmd_verify(verify, std::cout, std::cerr);
    return cmd_orbit(orbit, std::cout, std::cerr);
}
