// End-to-end CLI checks through the installed binary (PERI2D_CLI env var):
// info output tokens, run artifacts (scenario echo, timeseries, VTK,
// summary), override plumbing, a tiny rates study, a tiny discretization
// comparison, and exit codes for bad invocations.

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "peri/csv_io.hpp"
#include "peri/scenario.hpp"
#include "peri/vtk_io.hpp"

namespace fs = std::filesystem;
using namespace peri;

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string output; // stdout + stderr interleaved
};

const char* cli_path() { return std::getenv("PERI2D_CLI"); }

CmdResult run_cmd(const std::string& args) {
    const std::string cmd = std::string(cli_path()) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    EXPECT_NE(p, nullptr);
    CmdResult r;
    char buf[4096];
    while (p && fgets(buf, sizeof buf, p)) r.output += buf;
    if (p) {
        const int status = pclose(p);
        r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
    return r;
}

// First number following "key=" in the CLI output.
double parse_value(const std::string& out, const std::string& key) {
    const auto pos = out.find(key + "=");
    EXPECT_NE(pos, std::string::npos) << "missing " << key << " in:\n" << out;
    if (pos == std::string::npos) return 0.0;
    return std::stod(out.substr(pos + key.size() + 1));
}

std::string tmp_dir(const std::string& leaf) {
    const std::string d = std::string(::testing::TempDir()) + leaf;
    fs::remove_all(d);
    return d;
}

// Tiny scenario that runs in milliseconds: 5x5 lattice, 20 steps.
std::string write_tiny_scenario(const std::string& name, bool with_crack) {
    Scenario s;
    s.name = name;
    s.mesh = {MeshSource::Type::Uniform, 1.0, 0.25, ""};
    s.material.E = 1.0;
    s.material.rho = 1.0;
    s.material.Gc = 1.0;
    s.material.horizon = 0.5;
    s.dt = 1e-3;
    s.t_F = 0.02;
    s.dt_out = 0.01;
    s.bcs = {{"left", {0.0, 0.0, 0.0, 1.0}, true, true, BcKind::FixedDisplacement,
              {0.0, 0.0}, TimeProfile::Constant, 0.0},
             {"right", {1.0, 1.0, 0.0, 1.0}, true, false,
              BcKind::PrescribedVelocity, {0.1, 0.0}, TimeProfile::Constant, 0.0}};
    if (with_crack) {
        s.precracks = {{{0.5, 0.2}, {0.5, 0.8}}};
        s.crack_axis = CrackAxis{{0.0, 1.0}, {0.5, 0.8}};
    }
    const std::string path = std::string(::testing::TempDir()) + name + ".json";
    std::ofstream(path) << to_json(s).dump(2);
    return path;
}

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        if (!cli_path()) GTEST_SKIP() << "PERI2D_CLI not set";
    }
};

} // namespace

//----------------------------------------------------------------------------

TEST_F(CliTest, InfoPrintsCalibrationAndWaveSpeeds) {
    const CmdResult r = run_cmd("info --preset mode1 --m 4");
    EXPECT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NEAR(parse_value(r.output, "MJ"), 1.0 / 12.0, 1e-10);
    // " c" avoids matching the Gc= token on the material line.
    EXPECT_NEAR(parse_value(r.output, " c"), 1500.0 * M_PI, 1e-6);
    EXPECT_NEAR(parse_value(r.output, "beta"), 3e11 / (625.0 * M_PI), 0.1);
    EXPECT_NEAR(parse_value(r.output, "c_L"), 6123.724357, 1e-5);
    EXPECT_NEAR(parse_value(r.output, "c_S"), 3535.533906, 1e-5);
    EXPECT_NEAR(parse_value(r.output, "c_R"), 3244.205912, 1e-5);
    EXPECT_NE(r.output.find("Sc(horizon)="), std::string::npos);
    EXPECT_NE(r.output.find("dt_linearized="), std::string::npos);
}

TEST_F(CliTest, InfoAppliesOverrides) {
    // E=rho=1 base: c_L = sqrt(1.2); quadrupling E doubles every wave speed.
    const std::string scen = write_tiny_scenario("tiny_info", false);
    const CmdResult base = run_cmd("info --scenario " + scen);
    const CmdResult bumped =
        run_cmd("info --scenario " + scen + " --override material.E=4");
    EXPECT_EQ(base.exit_code, 0) << base.output;
    EXPECT_EQ(bumped.exit_code, 0) << bumped.output;
    const double cL0 = parse_value(base.output, "c_L");
    EXPECT_NEAR(cL0, std::sqrt(1.2), 1e-9);
    EXPECT_NEAR(parse_value(bumped.output, "c_L"), 2.0 * cL0, 1e-9);
}

TEST_F(CliTest, RunWritesAllArtifacts) {
    const std::string scen = write_tiny_scenario("tiny_run", true);
    const std::string out = tmp_dir("cli_run_out");
    const CmdResult r =
        run_cmd("run --scenario " + scen + " --out " + out + " --vtk-every 1 --quiet");
    ASSERT_EQ(r.exit_code, 0) << r.output;

    EXPECT_TRUE(fs::exists(out + "/scenario.json"));
    EXPECT_TRUE(fs::exists(out + "/summary.json"));
    const CsvTable ts = read_csv(out + "/timeseries.csv");
    ASSERT_GE(ts.header.size(), 4u);
    EXPECT_EQ(ts.header[0], "step");
    EXPECT_EQ(ts.header[1], "t");
    ASSERT_EQ(ts.rows.size(), 3u); // t = 0, 0.01, 0.02
    EXPECT_NEAR(ts.rows.back()[1], 0.02, 1e-12);

    // Crack columns present because the scenario declares a crack axis.
    bool has_speed = false;
    for (const auto& h : ts.header) has_speed = has_speed || h == "crack_speed";
    EXPECT_TRUE(has_speed);

    const VtkSummary snap = read_vtk_summary(out + "/snap_0002.vtk");
    EXPECT_EQ(snap.num_points, 25);
    EXPECT_EQ(snap.num_cells, 32);
    bool has_Z = false;
    for (const auto& f : snap.point_fields) has_Z = has_Z || f == "damage_Z";
    EXPECT_TRUE(has_Z);

    // The echoed scenario reloads to the same JSON (reproducible rerun).
    const Scenario echo = load_scenario(out + "/scenario.json");
    EXPECT_EQ(to_json(echo), to_json(load_scenario(scen)));
    fs::remove_all(out);
}

TEST_F(CliTest, RunHonorsOverridesInEchoedScenario) {
    const std::string scen = write_tiny_scenario("tiny_override", false);
    const std::string out = tmp_dir("cli_override_out");
    const CmdResult r = run_cmd("run --scenario " + scen + " --out " + out +
                                " --override time.t_F=0.01 --quiet");
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const Scenario echo = load_scenario(out + "/scenario.json");
    EXPECT_DOUBLE_EQ(echo.t_F, 0.01);
    fs::remove_all(out);
}

TEST_F(CliTest, TinyRatesStudyReportsMedianRate) {
    const std::string out = tmp_dir("cli_rates_out");
    const CmdResult r = run_cmd(
        "rates --preset convergence_square --ms 2 3 --ref 4 --tf-fraction 0.08 "
        "--out " + out + " --quiet");
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("median_rate"), std::string::npos) << r.output;
    EXPECT_TRUE(fs::exists(out + "/rates.csv"));
    const CsvTable t = read_csv(out + "/rates.csv");
    EXPECT_GE(t.rows.size(), 2u); // t = 0.01..0.04 snapshots
    fs::remove_all(out);
}

TEST_F(CliTest, TinyCompareReportsJaccard) {
    const std::string scen = write_tiny_scenario("tiny_cmp", true);
    const std::string out = tmp_dir("cli_cmp_out");
    const CmdResult r = run_cmd("compare-discretizations --scenario " + scen +
                                " --out " + out + " --quiet");
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("final_jaccard="), std::string::npos) << r.output;
    EXPECT_TRUE(fs::exists(out + "/compare.csv"));
    fs::remove_all(out);
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run_cmd("definitely-not-a-subcommand").exit_code, 2);
    EXPECT_EQ(run_cmd("").exit_code, 2); // a subcommand is required
    EXPECT_EQ(run_cmd("run --scenario /does/not/exist.json --out /tmp/x").exit_code,
              1);
    // --scenario and --preset are mutually exclusive.
    const std::string scen = write_tiny_scenario("tiny_excl", false);
    EXPECT_EQ(run_cmd("run --scenario " + scen + " --preset mode1 --out /tmp/x")
                  .exit_code,
              2);
    const CmdResult help = run_cmd("--help");
    EXPECT_EQ(help.exit_code, 0);
    EXPECT_NE(help.output.find("peri2d"), std::string::npos);
}
