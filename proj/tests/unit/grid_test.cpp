#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "drisk/errors.hpp"
#include "drisk/grid.hpp"
#include "test_oracles.hpp"

namespace drisk {
namespace {

TEST(Midpoint, CellCentres) {
  EXPECT_DOUBLE_EQ(midpoint(0, 2), 0.25);
  EXPECT_DOUBLE_EQ(midpoint(1, 2), 0.75);
  EXPECT_DOUBLE_EQ(midpoint(0, 10000), 0.5e-4);
}

TEST(MomentTarget, RejectsNonPositiveSigma) {
  EXPECT_THROW(MomentTarget(0.0, 0.0), Error);
  EXPECT_THROW(MomentTarget(0.0, -1.0), Error);
  EXPECT_NO_THROW(MomentTarget(-3.0, 0.5));
}

TEST(QuantileGrid, Validation) {
  EXPECT_THROW(QuantileGrid({1.0}), Error);
  EXPECT_THROW(QuantileGrid({2.0, 1.0}), Error);
  EXPECT_THROW(QuantileGrid({0.0, std::numeric_limits<double>::quiet_NaN()}), Error);
  EXPECT_NO_THROW(QuantileGrid({1.0, 1.0}));
}

TEST(GridStats, PopulationConvention) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(grid_mean(v), 2.5);
  EXPECT_DOUBLE_EQ(grid_std(v), std::sqrt(1.25));
  EXPECT_DOUBLE_EQ(grid_cov(v, v), 1.25);
}

TEST(GridStats, AgreeWithLongDoubleReference) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> a(257), b(257);
    for (auto& x : a) x = 3.0 + 2.0 * z(rng);
    for (auto& x : b) x = z(rng) - 0.5 * a[&x - b.data()];
    const auto ma = testing::moments(a);
    EXPECT_NEAR(grid_mean(a), ma.mean, 1e-13);
    EXPECT_NEAR(grid_std(a), ma.sd, 1e-13);
    EXPECT_NEAR(corr(a, b), testing::pearson(a, b), 1e-13);
    EXPECT_NEAR(wasserstein2_sq(a, b), testing::sq_distance(a, b), 1e-12);
  }
}

TEST(GridStats, CorrOfConstantThrows) {
  const std::vector<double> c{1.0, 1.0, 1.0};
  const std::vector<double> v{1.0, 2.0, 3.0};
  EXPECT_THROW(corr(c, v), Error);
  try {
    corr(v, c);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateGrid);
  }
}

TEST(GridStats, DistanceSizeMismatch) {
  const std::vector<double> a{1.0, 2.0};
  const std::vector<double> b{1.0, 2.0, 3.0};
  try {
    wasserstein2_sq(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridSizeMismatch);
  }
}

TEST(Standardize, HitsTargetMoments) {
  std::mt19937_64 rng(3);
  std::exponential_distribution<double> e;
  std::vector<double> v(500);
  double acc = 0.0;
  for (auto& x : v) x = acc += e(rng);
  const MomentTarget t(-1.5, 0.25);
  const auto s = standardized(v, t);
  EXPECT_NEAR(grid_mean(s), -1.5, 1e-12);
  EXPECT_NEAR(grid_std(s), 0.25, 1e-12);
  EXPECT_TRUE(is_non_decreasing(s));
  EXPECT_THROW(standardized(std::vector<double>{2.0, 2.0}, t), Error);
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.7), "0.7");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-2.5), "-2.5");
  const double x = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_number(x)), x);
}

}  // namespace
}  // namespace drisk
