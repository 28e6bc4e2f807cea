#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "drisk/grid.hpp"
#include "drisk/reference.hpp"

namespace drisk {

/// g(x) = min{x / (1 - alpha), 1}; weights 1/(1-alpha) on u > alpha.
struct CVaRDistortion {
  double alpha;
};

/// g(x) = 1{x > 1 - alpha}; a point mass at u = alpha in the continuum.
struct VaRDistortion {
  double alpha;
};

/// g(x) = 1 - (1 - x)^beta, concave for beta >= 1, gamma(u) = beta u^(beta-1).
struct DualPowerDistortion {
  double beta;
};

/// Linear interpolation through (x, g(x)) knots from (0,0) to (1,1).
struct PiecewiseLinearDistortion {
  std::vector<std::pair<double, double>> knots;
};

/// Spectral weights supplied directly, one per grid cell.
struct GammaTableDistortion {
  std::vector<double> weights;
};

/// Any distortion given as a callable g on [0,1].
struct FunctionDistortion {
  std::string name;
  std::function<double(double)> g;
};

class DistortionSpec {
 public:
  using Kind = std::variant<CVaRDistortion, VaRDistortion, DualPowerDistortion,
                            PiecewiseLinearDistortion, GammaTableDistortion, FunctionDistortion>;

  static DistortionSpec cvar(double alpha);
  static DistortionSpec var(double alpha);
  static DistortionSpec dual_power(double beta);
  static DistortionSpec piecewise(std::vector<std::pair<double, double>> knots);
  static DistortionSpec gamma_table(std::vector<double> weights);
  static DistortionSpec function(std::string name, std::function<double(double)> g);
  /// g(x) = 3x^2 - 2x^3: S-shaped, so gamma(u) = 6u(1-u) is a hump and the
  /// distortion is not concave.
  static DistortionSpec smoothstep();

  /// g(x) for x in [0,1].
  double operator()(double x) const;

  const Kind& kind() const noexcept { return kind_; }
  bool is_var() const noexcept { return std::holds_alternative<VaRDistortion>(kind_); }
  std::string describe() const;

 private:
  explicit DistortionSpec(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

/// Parses the compact CLI grammar: `cvar:0.7`, `var:0.95`, `dualpower:5`,
/// `piecewise:x1,y1;x2,y2;...`, `gammafile:<path>`, `smoothstep`.
DistortionSpec parse_distortion(std::string_view text);

/// Cell-averaged spectral weights gamma on the n-cell grid together with the
/// scalars the solver needs.
struct GammaGrid {
  std::vector<double> weights;
  double sigma0 = 0.0;       // std(gamma)
  bool is_concave = false;   // weights non-decreasing (tolerance 1e-12)
  bool satisfies_a1 = false; // sigma0 > 1e-12

  std::size_t size() const noexcept { return weights.size(); }
  operator std::span<const double>() const noexcept { return weights; }
};

inline constexpr double kConcavityTolerance = 1e-12;
inline constexpr double kSigma0Floor = 1e-12;

/// weights[i] = n [g(1 - i/n) - g(1 - (i+1)/n)], so the weights average to
/// g(1) - g(0) = 1. Throws InvalidDistortion for malformed specs.
GammaGrid gamma_grid(const DistortionSpec& g, std::size_t n);

/// H_g(G) = (1/n) sum gamma_i q_i.
double distortion_value(const GammaGrid& gamma, std::span<const double> q);

/// corr(F^{-1}(U), gamma(U)) on the grid. Throws AssumptionA1Violated when
/// sigma0 = 0.
double rho(const GammaGrid& gamma, const ReferenceDistribution& f, std::size_t n);
double rho(const GammaGrid& gamma, const DiscreteReference& f);

}  // namespace drisk
