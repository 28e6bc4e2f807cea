#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "drisk/cli.hpp"
#include "test_oracles.hpp"

namespace drisk::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "drisk");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

double field(const std::string& json, const std::string& key) {
  const auto pos = json.find("\"" + key + "\": ");
  if (pos == std::string::npos) return NAN;
  return std::stod(json.substr(pos + key.size() + 4));
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

TEST(Cli, SolveDualPower) {
  const auto r = run_cli({"solve", "--reference", "normal:0,1", "--distortion", "dualpower:5", "--mu", "0", "--sigma",
                          "1", "--delta", "0"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NEAR(field(r.out, "value"), 4.0 / 3.0, 1e-3);
  for (const char* k : {"regime", "risk_part", "achieved_distance_sq", "eps_min", "eps_max", "rho", "delta_star",
                        "eps_star", "used_isotonic"}) {
    EXPECT_NE(r.out.find(std::string("\"") + k + "\""), std::string::npos) << k;
  }
}

TEST(Cli, ZeroRadiusIsDegenerate) {
  const auto r = run_cli({"solve", "--distortion", "cvar:0.7", "--eps", "0"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("\"Degenerate\""), std::string::npos);
  const double s0 = std::sqrt(7.0 / 3.0);
  EXPECT_NEAR(field(r.out, "value"), s0 * field(r.out, "rho"), 1e-6);
}

TEST(Cli, ExitCodes) {
  auto r = run_cli({"solve", "--eps", "-1"});
  EXPECT_EQ(r.code, kInfeasible);
  EXPECT_NE(r.err.find("epsilon below eps_min: set is empty"), std::string::npos);
  EXPECT_EQ(run_cli({"solve", "--distortion", "cvar:abc"}).code, kParse);
  EXPECT_EQ(run_cli({"solve", "--delta", "x"}).code, kParse);
  EXPECT_EQ(run_cli({"solve", "--bogus"}).code, kParse);
  EXPECT_EQ(run_cli({}).code, kParse);
  r = run_cli({"solve", "--distortion", "dualpower:1"});
  EXPECT_EQ(r.code, kAssumption);
  EXPECT_NE(r.err.find("sigma0 = 0: Assumption 2.1 fails"), std::string::npos);
  EXPECT_EQ(run_cli({"verify", "--self-test", "--samples", "300"}).code, kVerification);
}

TEST(Cli, InfoReportsScalars) {
  auto r = run_cli({"info", "--distortion", "cvar:0.7", "--reference", "normal:0,1", "--mu", "0", "--sigma", "1"});
  ASSERT_EQ(r.code, kOk);
  EXPECT_NEAR(field(r.out, "eps_min"), 0.0, 1e-8);
  EXPECT_NEAR(field(r.out, "rho"), 0.759, 1e-3);
  EXPECT_NEAR(field(r.out, "sigma0"), 1.527, 1e-3);

  r = run_cli({"info", "--distortion", "dualpower:1"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.err.find("sigma0 = 0"), std::string::npos);
  EXPECT_NE(r.out.find("\"assumption_a1\": false"), std::string::npos);

  r = run_cli({"info", "--distortion", "var:0.95"});
  EXPECT_EQ(r.code, kAssumption);
  EXPECT_NE(r.err.find("discretization"), std::string::npos);
  EXPECT_EQ(run_cli({"info", "--distortion", "var:0.95", "--allow-var", "--grid-n", "1000"}).code, kOk);

  r = run_cli({"info", "--distortion", "smoothstep", "--grid-n", "1000"});
  EXPECT_NE(r.out.find("\"assumption_a4\""), std::string::npos);
}

TEST(Cli, SweepCsvShape) {
  const auto r = run_cli({"sweep", "--distortion", "dualpower:5", "--eps", "0.085", "--axis", "delta", "--from", "0",
                          "--to", "1", "--steps", "21", "--grid-n", "2000"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 22u);
  EXPECT_EQ(ls[0], "axis_value,regime,value,achieved_distance_sq,delta_star_or_eps_star");
  // Regime switches once, at the reported threshold.
  double dstar = 0.0;
  int switches = 0;
  std::string prev;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    std::vector<std::string> cells;
    std::istringstream row(ls[i]);
    for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 5u);
    dstar = std::stod(cells[4]);
    const double x = std::stod(cells[0]);
    EXPECT_EQ(cells[1], x < dstar ? "Boundary" : "Interior") << ls[i];
    switches += !prev.empty() && prev != cells[1];
    prev = cells[1];
  }
  EXPECT_EQ(switches, 1);
  EXPECT_NEAR(dstar, 0.51, 0.05);
}

TEST(Cli, SweepEmitsInfeasibleRows) {
  const auto r = run_cli({"sweep", "--axis", "eps", "--from", "-0.2", "--to", "0.6", "--steps", "5", "--delta", "0.5",
                          "--grid-n", "1000"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 6u);
  EXPECT_EQ(ls[1], "-0.2,Infeasible,,,");
}

TEST(Cli, OutputIsDeterministic) {
  const std::vector<std::string> args{"sweep", "--distortion", "smoothstep", "--eps", "0.1", "--from", "0", "--to", "2",
                                      "--steps", "5", "--grid-n", "500"};
  EXPECT_EQ(run_cli(args).out, run_cli(args).out);
  const std::vector<std::string> v{"verify", "--distortion", "smoothstep", "--samples", "500", "--seed", "9"};
  EXPECT_EQ(run_cli(v).out, run_cli(v).out);
}

TEST(Cli, QuantileCsv) {
  const auto r = run_cli({"solve", "--format", "csv", "--grid-n", "4", "--delta", "0.1"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 5u);
  EXPECT_EQ(ls[0], "u,optimal,reference");
  EXPECT_EQ(ls[1].substr(0, 6), "0.125,");
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const std::string path = ::testing::TempDir() + "/drisk_test.cfg";
  {
    std::ofstream f(path);
    f << "# comment\nreference = normal:0,1\ndistortion=dualpower:5\ndelta=0.7\ngrid-n=2000\n";
  }
  const auto from_file = run_cli({"solve", "--config", path});
  const auto flags = run_cli({"solve", "--distortion", "dualpower:5", "--delta", "0.7", "--grid-n", "2000"});
  ASSERT_EQ(from_file.code, kOk) << from_file.err;
  EXPECT_EQ(from_file.out, flags.out);
  const auto overridden = run_cli({"solve", "--config", path, "--delta", "0"});
  EXPECT_NEAR(field(overridden.out, "value"), 4.0 / 3.0, 1e-3);
  std::remove(path.c_str());
}

TEST(Cli, EmpiricalIngestion) {
  const std::string ref = "empirical:" + testing::data_path("normal_draws_1000.csv");
  auto r = run_cli({"solve", "--reference", ref, "--distortion", "cvar:0.7", "--delta", "0.3"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NEAR(field(r.out, "eps_min"), 0.0, 1e-10);
  r = run_cli({"verify", "--reference", ref, "--distortion", "cvar:0.7", "--delta", "0.3", "--samples", "2000"});
  EXPECT_EQ(r.code, kOk) << r.err << r.out;
  EXPECT_EQ(run_cli({"solve", "--reference", "empirical:/nonexistent.csv"}).code, kParse);
}

TEST(Cli, ParseReference) {
  EXPECT_DOUBLE_EQ(parse_reference("uniform:0,2").mean(), 1.0);
  EXPECT_THROW(parse_reference("normal:0"), Error);
  EXPECT_THROW(parse_reference("normal:0,-1"), Error);
  EXPECT_THROW(parse_reference("gamma:1,1"), Error);
}

}  // namespace
}  // namespace drisk::cli
