#include "drisk/reference.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "drisk/errors.hpp"
#include "drisk/normal_quantile.hpp"

namespace drisk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Left-continuous step quantile of an m-point table evaluated at the n
// midpoints: index ceil(u_i * m) (one-based), done in integers so that the
// midpoints that land exactly on a step are resolved consistently.
std::vector<double> step_quantile(std::span<const double> sorted, std::size_t n) {
  const std::size_t m = sorted.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t num = (2 * i + 1) * m;
    const std::size_t k = (num + 2 * n - 1) / (2 * n);
    out[i] = sorted[std::clamp<std::size_t>(k, 1, m) - 1];
  }
  return out;
}

}  // namespace

ReferenceDistribution::ReferenceDistribution(Kind kind, double mean, double sd)
    : kind_(std::move(kind)), mean_(mean), sd_(sd) {
  if (!(sd_ > 0.0) || !std::isfinite(sd_) || !std::isfinite(mean_)) {
    fail(ErrorCode::InvalidArgument, "reference distribution needs sigma_F > 0");
  }
}

ReferenceDistribution ReferenceDistribution::normal(double mean, double sd) {
  if (!(sd > 0.0)) fail(ErrorCode::InvalidArgument, "normal reference needs sd > 0");
  return {NormalReference{mean, sd}, mean, sd};
}

ReferenceDistribution ReferenceDistribution::uniform(double lo, double hi) {
  if (!(lo < hi)) fail(ErrorCode::InvalidArgument, "uniform reference needs lo < hi");
  return {UniformReference{lo, hi}, 0.5 * (lo + hi), (hi - lo) / std::sqrt(12.0)};
}

ReferenceDistribution ReferenceDistribution::empirical(std::vector<double> samples) {
  for (double x : samples) {
    if (!std::isfinite(x)) fail(ErrorCode::InvalidArgument, "empirical sample is not finite");
  }
  std::sort(samples.begin(), samples.end());
  if (samples.size() < 2 || samples.front() == samples.back()) {
    fail(ErrorCode::InvalidArgument,
         "empirical reference needs at least two distinct values (sigma_F > 0)");
  }
  const double m = grid_mean(samples);
  const double s = grid_std(samples);
  return {EmpiricalReference{std::move(samples)}, m, s};
}

ReferenceDistribution ReferenceDistribution::tabulated(QuantileGrid grid) {
  const double m = grid_mean(grid);
  const double s = grid_std(grid);
  if (!(s > 0.0)) fail(ErrorCode::InvalidArgument, "tabulated reference is constant");
  return {TabulatedReference{std::move(grid)}, m, s};
}

double ReferenceDistribution::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) fail(ErrorCode::InvalidArgument, "quantile level must lie in (0,1)");
  return std::visit(
      overloaded{
          [u](const NormalReference& r) { return r.mean + r.sd * normal_quantile(u); },
          [u](const UniformReference& r) { return r.lo + u * (r.hi - r.lo); },
          [u](const EmpiricalReference& r) {
            const auto m = static_cast<double>(r.sorted.size());
            const auto k = static_cast<std::size_t>(std::ceil(u * m));
            return r.sorted[std::clamp<std::size_t>(k, 1, r.sorted.size()) - 1];
          },
          [u](const TabulatedReference& r) {
            const auto m = static_cast<double>(r.grid.size());
            const auto k = static_cast<std::size_t>(std::ceil(u * m));
            return r.grid[std::clamp<std::size_t>(k, 1, r.grid.size()) - 1];
          },
      },
      kind_);
}

std::string ReferenceDistribution::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const NormalReference& r) { os << "normal:" << format_number(r.mean) << ',' << format_number(r.sd); },
                 [&](const UniformReference& r) { os << "uniform:" << format_number(r.lo) << ',' << format_number(r.hi); },
                 [&](const EmpiricalReference& r) { os << "empirical[" << r.sorted.size() << ']'; },
                 [&](const TabulatedReference& r) { os << "tabulated[" << r.grid.size() << ']'; },
             },
             kind_);
  return os.str();
}

QuantileGrid sample_quantile(const ReferenceDistribution& f, std::size_t n) {
  if (n < 2) fail(ErrorCode::InvalidArgument, "grid size must be at least 2");
  std::vector<double> values = std::visit(
      overloaded{
          [n](const NormalReference& r) {
            // Fill the lower half and mirror so the standard grid is exactly
            // antisymmetric about the median.
            std::vector<double> z(n);
            for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
              z[i] = normal_quantile(midpoint(i, n));
              z[n - 1 - i] = -z[i];
            }
            if (n % 2 == 1) z[n / 2] = 0.0;
            for (double& x : z) x = r.mean + r.sd * x;
            return z;
          },
          [n](const UniformReference& r) {
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = r.lo + midpoint(i, n) * (r.hi - r.lo);
            return v;
          },
          [n](const EmpiricalReference& r) { return step_quantile(r.sorted, n); },
          [n](const TabulatedReference& r) { return step_quantile(r.grid.values(), n); },
      },
      f.kind());
  return QuantileGrid(std::move(values));
}

DiscreteReference discretize(const ReferenceDistribution& f, std::size_t n) {
  QuantileGrid grid = sample_quantile(f, n);
  const double m = grid_mean(grid);
  const double s = grid_std(grid);
  if (!(s > 0.0)) {
    fail(ErrorCode::DegenerateGrid, "reference grid is constant at n = " + std::to_string(n));
  }
  return {std::move(grid), m, s};
}

double wasserstein2_sq_decomposed(const ReferenceDistribution& f, const QuantileGrid& g,
                                  const MomentTarget& target) {
  const double gm = grid_mean(g);
  const double gs = grid_std(g);
  if (std::abs(gm - target.mu()) > 1e-8 * std::max(1.0, std::abs(target.mu())) ||
      std::abs(gs - target.sigma()) > 1e-8 * std::max(1.0, target.sigma())) {
    fail(ErrorCode::MomentMismatch, "grid moments do not match the target (mu, sigma)");
  }
  const DiscreteReference ref = discretize(f, g.size());
  const double dm = ref.mean - target.mu();
  const double ds = ref.sd - target.sigma();
  return dm * dm + ds * ds + 2.0 * target.sigma() * ref.sd * (1.0 - corr(ref.grid, g));
}

}  // namespace drisk
