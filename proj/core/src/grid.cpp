#include "drisk/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "drisk/errors.hpp"

namespace drisk {

namespace {

void require_same_size(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::GridSizeMismatch, "grid sizes differ: " + std::to_string(a.size()) +
                                          " vs " + std::to_string(b.size()));
  }
}

}  // namespace

MomentTarget::MomentTarget(double mu, double sigma) : mu_(mu), sigma_(sigma) {
  if (!std::isfinite(mu) || !std::isfinite(sigma) || !(sigma > 0.0)) {
    fail(ErrorCode::InvalidArgument, "moment target requires finite mu and sigma > 0");
  }
}

QuantileGrid::QuantileGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    fail(ErrorCode::InvalidArgument, "quantile grid needs at least 2 cells");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "quantile grid value is not finite");
  }
  if (!is_non_decreasing(values_)) {
    fail(ErrorCode::InvalidArgument, "quantile grid values must be non-decreasing");
  }
}

double grid_mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double grid_cov(std::span<const double> a, std::span<const double> b) {
  require_same_size(a, b);
  if (a.empty()) return 0.0;
  const double ma = grid_mean(a);
  const double mb = grid_mean(b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - ma) * (b[i] - mb);
  return sum / static_cast<double>(a.size());
}

double grid_std(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double m = grid_mean(v);
  double sum = 0.0;
  for (double x : v) sum += (x - m) * (x - m);
  return std::sqrt(sum / static_cast<double>(v.size()));
}

double corr(std::span<const double> a, std::span<const double> b) {
  require_same_size(a, b);
  const double sa = grid_std(a);
  const double sb = grid_std(b);
  if (!(sa > 0.0) || !(sb > 0.0)) {
    fail(ErrorCode::DegenerateGrid, "correlation undefined for a constant vector");
  }
  const double c = grid_cov(a, b) / (sa * sb);
  return std::clamp(c, -1.0, 1.0);
}

double wasserstein2_sq(std::span<const double> a, std::span<const double> b) {
  require_same_size(a, b);
  if (a.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

bool is_non_decreasing(std::span<const double> v) noexcept {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) return false;
  }
  return true;
}

std::vector<double> standardized(std::span<const double> v, const MomentTarget& target) {
  const double m = grid_mean(v);
  const double s = grid_std(v);
  if (!(s > 0.0)) fail(ErrorCode::DegenerateGrid, "cannot standardize a constant grid");
  const double scale = target.sigma() / s;
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = target.mu() + scale * (v[i] - m);
  return out;
}

QuantileGrid standardize_to(const QuantileGrid& q, const MomentTarget& target) {
  return QuantileGrid(standardized(q, target));
}

std::string format_number(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace drisk
