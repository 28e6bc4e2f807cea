#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace drisk {

inline constexpr std::size_t kDefaultGridSize = 10'000;

/// Midpoint u_i = (2i+1)/(2n) of cell i (zero-based) of the uniform n-cell
/// partition of (0,1). Every grid in the library is sampled at these points.
constexpr double midpoint(std::size_t i, std::size_t n) noexcept {
  return (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(n));
}

/// Target first two moments of the uncertainty set: mean mu and standard
/// deviation sigma > 0.
class MomentTarget {
 public:
  MomentTarget(double mu, double sigma);

  double mu() const noexcept { return mu_; }
  double sigma() const noexcept { return sigma_; }

 private:
  double mu_;
  double sigma_;
};

/// A discretized left-continuous quantile function: values[i] = G^{-1}(u_i)
/// at the midpoints. Always weakly non-decreasing with at least two cells.
class QuantileGrid {
 public:
  explicit QuantileGrid(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  operator std::span<const double>() const noexcept { return values_; }

  friend bool operator==(const QuantileGrid&, const QuantileGrid&) = default;

 private:
  std::vector<double> values_;
};

// Statistics under the uniform n-cell measure (population convention).
// These accept any vector of cell values, monotone or not.

double grid_mean(std::span<const double> v);
double grid_std(std::span<const double> v);
double grid_cov(std::span<const double> a, std::span<const double> b);
double corr(std::span<const double> a, std::span<const double> b);

/// (1/n) * sum (a_i - b_i)^2, i.e. the squared L2 distance of two quantile
/// functions, which is the squared 2-Wasserstein distance of their laws.
double wasserstein2_sq(std::span<const double> a, std::span<const double> b);

bool is_non_decreasing(std::span<const double> v) noexcept;

/// Affine rescaling mu + sigma * (v - mean) / std. Throws DegenerateGrid when
/// std(v) == 0.
std::vector<double> standardized(std::span<const double> v, const MomentTarget& target);
QuantileGrid standardize_to(const QuantileGrid& q, const MomentTarget& target);

/// Shortest decimal text that reads back to exactly x.
std::string format_number(double x);

}  // namespace drisk
