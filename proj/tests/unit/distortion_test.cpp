#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "drisk/distortion.hpp"
#include "drisk/errors.hpp"
#include "test_oracles.hpp"

namespace drisk {
namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::InternalError;
}

TEST(ParseDistortion, Grammar) {
  EXPECT_TRUE(std::holds_alternative<CVaRDistortion>(parse_distortion("cvar:0.7").kind()));
  EXPECT_TRUE(parse_distortion("var:0.95").is_var());
  EXPECT_TRUE(std::holds_alternative<DualPowerDistortion>(parse_distortion("dualpower:5").kind()));
  const auto pw = parse_distortion("piecewise:0,0;0.5,0.8;1,1");
  ASSERT_TRUE(std::holds_alternative<PiecewiseLinearDistortion>(pw.kind()));
  EXPECT_DOUBLE_EQ(pw(0.25), 0.4);
  EXPECT_EQ(parse_distortion("smoothstep").describe(), "smoothstep");
  EXPECT_EQ(parse_distortion("cvar:0.7").describe(), "cvar:0.7");
}

TEST(ParseDistortion, Rejects) {
  EXPECT_EQ(code_of([] { parse_distortion("cvar"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_distortion("cvar:x"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_distortion("lognormal:1"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_distortion("cvar:1"); }), ErrorCode::InvalidDistortion);
  EXPECT_EQ(code_of([] { parse_distortion("dualpower:0.5"); }), ErrorCode::InvalidDistortion);
  EXPECT_EQ(code_of([] { parse_distortion("piecewise:0,0;0.5,0.8"); }), ErrorCode::InvalidDistortion);
  EXPECT_EQ(code_of([] { parse_distortion("piecewise:0,0;0.5,0.8;0.4,0.9;1,1"); }), ErrorCode::InvalidDistortion);
}

TEST(GammaGrid, WeightsAverageToOne) {
  for (const char* s : {"cvar:0.7", "cvar:0.12345", "dualpower:5", "dualpower:2.5", "piecewise:0,0;0.3,0.7;1,1",
                        "smoothstep"}) {
    const auto g = gamma_grid(parse_distortion(s), 997);
    EXPECT_NEAR(grid_mean(g.weights), 1.0, 1e-12) << s;
  }
}

TEST(GammaGrid, CvarScalars) {
  // alpha n is an integer here, so the grid sigma0 is exactly sqrt(alpha / (1 - alpha)).
  const auto g = gamma_grid(DistortionSpec::cvar(0.7), 10000);
  EXPECT_TRUE(g.is_concave);
  EXPECT_NEAR(g.sigma0, std::sqrt(7.0 / 3.0), 1e-12);
  EXPECT_DOUBLE_EQ(g.weights[6999], 0.0);
  EXPECT_DOUBLE_EQ(g.weights[7000], 1.0 / 0.3);
}

TEST(GammaGrid, CvarPartialCell) {
  const auto g = gamma_grid(DistortionSpec::cvar(0.75), 10);
  // Cell [0.7, 0.8] is half above alpha.
  EXPECT_NEAR(g.weights[7], 0.5 / 0.25, 1e-12);
  EXPECT_NEAR(g.weights[8], 4.0, 1e-12);
}

TEST(GammaGrid, CvarRhoAgainstMidpointOracle) {
  const std::size_t n = 10000;
  const auto g = gamma_grid(DistortionSpec::cvar(0.7), n);
  const double ez_gamma = testing::midpoint_sum(
      [](double u) { return u > 0.7 ? testing::normal_quantile_bisect(u) / 0.3 : 0.0; }, n);
  const double sd_f = std::sqrt(
      testing::midpoint_sum([](double u) { return std::pow(testing::normal_quantile_bisect(u), 2); }, n));
  const double oracle = ez_gamma / (sd_f * std::sqrt(7.0 / 3.0));
  const double r = rho(g, ReferenceDistribution::normal(0.0, 1.0), n);
  EXPECT_NEAR(r, oracle, 1e-10);
  EXPECT_NEAR(r, 0.7587605, 1e-6);
  // Continuum value phi(Phi^-1(0.7)) / (0.3 sigma0).
  const double cont = testing::normal_pdf(testing::normal_quantile_bisect(0.7)) / (0.3 * std::sqrt(7.0 / 3.0));
  EXPECT_NEAR(r, cont, 5e-3);
}

TEST(GammaGrid, DualPowerScalars) {
  const auto g = gamma_grid(DistortionSpec::dual_power(5), 10000);
  EXPECT_TRUE(g.is_concave);
  EXPECT_NEAR(g.sigma0, 4.0 / 3.0, 1e-7);
  // Cell averages of 5 u^4.
  const std::size_t n = 10000;
  for (std::size_t i : {0u, 1234u, 9999u}) {
    const double a = static_cast<double>(i) / n;
    const double b = static_cast<double>(i + 1) / n;
    EXPECT_NEAR(g.weights[i], (std::pow(b, 5) - std::pow(a, 5)) * n, 1e-10);
  }
  EXPECT_NEAR(rho(g, ReferenceDistribution::normal(0.0, 1.0), n), 0.8722516, 1e-6);
}

TEST(GammaGrid, IdentityDistortionFailsA1) {
  const auto g = gamma_grid(DistortionSpec::dual_power(1), 100);
  EXPECT_FALSE(g.satisfies_a1);
  EXPECT_EQ(g.sigma0, 0.0);
  try {
    rho(g, ReferenceDistribution::normal(0.0, 1.0), 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AssumptionA1Violated);
    EXPECT_STREQ(e.what(), "sigma0 = 0: Assumption 2.1 fails");
  }
}

TEST(GammaGrid, SmoothstepIsHumpShaped) {
  const std::size_t n = 1000;
  const auto g = gamma_grid(DistortionSpec::smoothstep(), n);
  EXPECT_FALSE(g.is_concave);
  EXPECT_TRUE(g.satisfies_a1);
  // Cell averages of 6u(1-u); sigma0^2 = 6/5 - 1.
  EXPECT_NEAR(g.weights[n / 2], 1.5, 1e-5);
  EXPECT_NEAR(g.sigma0, std::sqrt(0.2), 1e-5);
  EXPECT_NEAR(rho(g, ReferenceDistribution::normal(0.0, 1.0), n), 0.0, 1e-12);  // symmetric hump
}

TEST(GammaGrid, VarIsSingleSpike) {
  const auto g = gamma_grid(DistortionSpec::var(0.95), 100);
  std::size_t nonzero = 0;
  for (double w : g.weights) nonzero += w != 0.0;
  EXPECT_EQ(nonzero, 1u);
  // The mass at u = 0.95 falls in the cell ending there.
  EXPECT_DOUBLE_EQ(g.weights[94], 100.0);
}

TEST(GammaGrid, PiecewiseMatchesFunctionForm) {
  const auto pw = DistortionSpec::piecewise({{0, 0}, {0.3, 0.7}, {1, 1}});
  const auto fn = DistortionSpec::function("same", [](double x) { return x < 0.3 ? x * 7.0 / 3.0 : 0.7 + (x - 0.3) * 0.3 / 0.7; });
  const auto a = gamma_grid(pw, 1000);
  const auto b = gamma_grid(fn, 1000);
  for (std::size_t i = 0; i < 1000; ++i) EXPECT_NEAR(a.weights[i], b.weights[i], 1e-9);
  EXPECT_TRUE(a.is_concave);
}

TEST(GammaGrid, TableFromFile) {
  const std::string path = ::testing::TempDir() + "/gamma_table.csv";
  {
    std::ofstream f(path);
    f << "gamma\n0\n0.5\n1.5\n2\n";
  }
  const auto spec = parse_distortion("gammafile:" + path);
  const auto g = gamma_grid(spec, 4);
  EXPECT_EQ(g.weights, (std::vector<double>{0.0, 0.5, 1.5, 2.0}));
  EXPECT_EQ(code_of([&] { gamma_grid(spec, 5); }), ErrorCode::InvalidDistortion);
  std::remove(path.c_str());
}

TEST(GammaGrid, TableMustAverageOne) {
  EXPECT_EQ(code_of([] { DistortionSpec::gamma_table({1.0, 2.0}); }), ErrorCode::InvalidDistortion);
}

TEST(DistortionValue, CvarIsTailMean) {
  const std::size_t n = 10;
  const auto g = gamma_grid(DistortionSpec::cvar(0.8), n);
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = static_cast<double>(i);
  EXPECT_NEAR(distortion_value(g, q), 8.5, 1e-12);
}

}  // namespace
}  // namespace drisk
