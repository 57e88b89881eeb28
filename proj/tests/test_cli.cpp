// Runs the ellbill executable and checks its output and exit codes.

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <gtest/gtest.h>

namespace {

struct Invocation {
    int code;
    std::string out;
};

Invocation run(const std::string& args)
{
    const std::string cmd = std::string(ELLBILL_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        throw std::runtime_error("popen failed: " + cmd);
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0)
        out.append(buf, got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep))
        parts.push_back(item);
    if (!s.empty() && s.back() == sep)
        parts.emplace_back();
    return parts;
}

// Data lines (not starting with '#') split into fields, header first.
std::vector<std::vector<std::string>> csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    for (const auto& line : split(text, '\n'))
        if (!line.empty() && line[0] != '#')
            rows.push_back(split(line, ','));
    return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name)
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return i;
    throw std::runtime_error("no column " + name);
}

TEST(Cli, PeriodicCircleSquare)
{
    const Invocation r = run("periodic --a 1 --b 1 --n 4");
    ASSERT_EQ(r.code, 0);
    const auto rows = csv(r.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1][column(rows[0], "status")], "OK");
    EXPECT_NEAR(std::stod(rows[1][column(rows[0], "lambda")]), 0.5, 1e-14);
    EXPECT_NEAR(std::stod(rows[1][column(rows[0], "perimeter")]), 4 * std::sqrt(2.0), 1e-13);
}

TEST(Cli, PeriodicIdentityResidualAndLargeN)
{
    const Invocation r = run("periodic --a 2 --n 3,100");
    ASSERT_EQ(r.code, 0);
    const auto rows = csv(r.out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_LT(std::stod(rows[1][column(rows[0], "sum_cos_residual")]), 1e-9);
    const std::string status = rows[2][column(rows[0], "status")];
    EXPECT_TRUE(status == "OK" || status == "SKIPPED");
}

TEST(Cli, OrbitCircleSquare)
{
    const Invocation r = run("orbit --a 1 --b 1 --lambda 0.5 --u0 0 --n 4");
    ASSERT_EQ(r.code, 0);
    const auto rows = csv(r.out);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"index", "x", "y", "u_lifted", "joachimsthal_residual"}));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_NEAR(std::abs(std::stod(rows[i][1])), std::sqrt(0.5), 1e-14);
        EXPECT_NEAR(std::abs(std::stod(rows[i][2])), std::sqrt(0.5), 1e-14);
    }
    EXPECT_NEAR(std::stod(rows[5][3]), 2 * M_PI, 1e-14);
}

TEST(Cli, OrbitResidualColumn)
{
    const Invocation r = run("orbit --a 2 --lambda 0.37 --n 1000");
    ASSERT_EQ(r.code, 0);
    const auto rows = csv(r.out);
    ASSERT_EQ(rows.size(), 1002u);
    for (std::size_t i = 1; i < rows.size(); ++i)
        ASSERT_LT(std::stod(rows[i][4]), 1e-9);
}

TEST(Cli, UsageErrorsExitTwo)
{
    EXPECT_EQ(run("orbit --a 2 --lambda -1").code, 2);
    EXPECT_EQ(run("sweep --a 2 --lambda-max 1.5").code, 2);
    EXPECT_EQ(run("sweep --a 0.5").code, 2);
    EXPECT_EQ(run("sweep --a 2 --method nope").code, 2);
    EXPECT_EQ(run("periodic --a 2 --n 2").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("").code, 2);
}

TEST(Cli, NumericalFailureExitsThree)
{
    // a^2 - lambda rounds to a^2, so the caustic parameters collapse.
    EXPECT_EQ(run("sweep --a 1e8 --steps 2").code, 3);
}

TEST(Cli, VerifyCircleQuick)
{
    const Invocation r = run("verify --a 1 --b 1 --quick");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
    EXPECT_NE(r.out.find("PASS circle exactness"), std::string::npos);
}

TEST(Cli, SweepIsDeterministicWithPeriodicRows)
{
    const std::string args = "sweep --a 2 --steps 12 --mark-periodics 3,4,5,6,7";
    const Invocation first = run(args);
    const Invocation second = run(args);
    ASSERT_EQ(first.code, 0);
    EXPECT_EQ(first.out, second.out);
    EXPECT_EQ(first.out.rfind("# ellbill sweep", 0), 0u);

    const auto rows = csv(first.out);
    const auto& h = rows[0];
    int periodic = 0;
    double previous_lambda = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        ASSERT_EQ(row.size(), h.size());
        const double lambda = std::stod(row[column(h, "lambda")]);
        EXPECT_GT(lambda, previous_lambda);
        previous_lambda = lambda;
        if (row[0] != "PERIODIC")
            continue;
        ++periodic;
        auto val = [&](const char* name) { return std::stod(row[column(h, name)]); };
        EXPECT_NEAR(val("discrete_sidelength"), val("mean_sidelength"), 1e-6 * val("mean_sidelength"));
        EXPECT_NEAR(val("discrete_cosine"), val("mean_cosine"), 1e-6);
        EXPECT_NEAR(val("discrete_kappa23"), val("mean_kappa23"), 1e-6 * val("mean_kappa23"));
        EXPECT_NEAR(val("discrete_outer_abs"), val("geomean_outer_abs"), 1e-6);
    }
    EXPECT_EQ(periodic, 5);
}

} // namespace
