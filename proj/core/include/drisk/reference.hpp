#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "drisk/grid.hpp"

namespace drisk {

struct NormalReference {
  double mean;
  double sd;
};

struct UniformReference {
  double lo;
  double hi;
};

/// Sorted ascending sample; its law is the empirical distribution.
struct EmpiricalReference {
  std::vector<double> sorted;
};

struct TabulatedReference {
  QuantileGrid grid;
};

/// The reference distribution F around which the Wasserstein ball is drawn.
/// Immutable; the moments are cached at construction (analytic for the
/// parametric kinds, population moments for samples and tables).
class ReferenceDistribution {
 public:
  using Kind = std::variant<NormalReference, UniformReference, EmpiricalReference,
                            TabulatedReference>;

  static ReferenceDistribution normal(double mean, double sd);
  static ReferenceDistribution uniform(double lo, double hi);
  /// Sorts the samples; requires at least two distinct finite values.
  static ReferenceDistribution empirical(std::vector<double> samples);
  static ReferenceDistribution tabulated(QuantileGrid grid);

  /// Left-continuous quantile F^{-1}(u) for u in (0,1).
  double quantile(double u) const;

  double mean() const noexcept { return mean_; }
  double stddev() const noexcept { return sd_; }
  const Kind& kind() const noexcept { return kind_; }
  std::string describe() const;

 private:
  ReferenceDistribution(Kind kind, double mean, double sd);

  Kind kind_;
  double mean_;
  double sd_;
};

/// values[i] = F^{-1}(u_i) at the n midpoints. For step distributions
/// (samples, tables) this is the left-continuous step quantile.
QuantileGrid sample_quantile(const ReferenceDistribution& f, std::size_t n);

/// The reference as the solver sees it: its midpoint grid together with the
/// grid moments. All solver closed forms use these, not the analytic moments,
/// so that they are exact for the discretized problem.
struct DiscreteReference {
  QuantileGrid grid;
  double mean;
  double sd;
};

DiscreteReference discretize(const ReferenceDistribution& f, std::size_t n);

/// (mu_F - mu)^2 + (sigma_F - sigma)^2 + 2 sigma sigma_F (1 - corr(F^{-1}, G^{-1}))
/// using grid moments of F at g.size() cells. Requires g to carry the target
/// moments to 1e-8, otherwise throws MomentMismatch.
double wasserstein2_sq_decomposed(const ReferenceDistribution& f, const QuantileGrid& g,
                                  const MomentTarget& target);

}  // namespace drisk
