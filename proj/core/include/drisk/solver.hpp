#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "drisk/distortion.hpp"
#include "drisk/grid.hpp"
#include "drisk/reference.hpp"

namespace drisk {

/// Linear penalty phi(x) = delta * x on the squared Wasserstein distance.
class PenaltySpec {
 public:
  explicit PenaltySpec(double delta = 0.0);
  double delta() const noexcept { return delta_; }

 private:
  double delta_;
};

struct SolverOptions {
  /// VaR weights are a single spike of height n whose effect depends on the
  /// grid; such problems are refused unless this is set.
  bool allow_var = false;
  /// Take the isotonic (general distortion) route even for concave weights.
  bool force_general = false;
};

/// sup over G in N of H_g(G) - delta d_W^2(F, G), with N the moment set
/// M(mu, sigma) when radius_sq is empty, else its intersection with the
/// Wasserstein ball d_W^2(F, G) <= radius_sq.
struct ProblemSpec {
  ReferenceDistribution reference;
  DistortionSpec distortion;
  MomentTarget target;
  PenaltySpec penalty;
  std::optional<double> radius_sq;
  std::size_t grid_size = kDefaultGridSize;
  SolverOptions options;
};

enum class Regime { Infeasible, Degenerate, Interior, Boundary, Unconstrained, MomentOnly };

std::string_view to_string(Regime regime) noexcept;

struct SolverDiagnostics {
  double eps_min = 0.0;
  double eps_max = 0.0;  // concave: from rho; general: from rho_hat
  double rho = 0.0;      // concave: corr(F, gamma); general: corr(F, isotonic(gamma))
  double sigma0 = 0.0;
  double sigma_delta = 0.0;  // std of the (projected) score at the optimum's family index
  double mu_delta = 0.0;
  std::optional<double> delta_star;
  std::optional<double> eps_star;
  bool used_isotonic = false;
  bool concave = false;
  std::vector<std::string> warnings;
};

struct Solution {
  Regime regime = Regime::MomentOnly;
  QuantileGrid optimal_quantile;
  double value = 0.0;       // risk_part - delta * achieved_distance_sq
  double risk_part = 0.0;   // H_g at the optimum
  double achieved_distance_sq = 0.0;
  SolverDiagnostics diagnostics;
};

struct A4Report {
  bool applicable = true;  // false when sigma0 = 0
  bool holds_a = true;     // corr(F, r_delta) non-decreasing in delta
  bool holds_b = true;     // corr(gamma + 2 delta F, r_delta') non-increasing in delta' > delta
  std::optional<std::pair<double, double>> violation_a;
  std::optional<std::pair<double, double>> violation_b;
  std::vector<double> deltas;
  std::vector<double> corr_a;
  bool passed() const noexcept { return applicable && holds_a && holds_b; }
};

/// A problem with its grids prepared. Copies are cheap: the discretized
/// reference and weights are shared and immutable, only delta and the
/// radius are per-instance.
class Problem {
 public:
  explicit Problem(const ProblemSpec& spec);

  Problem with_delta(double delta) const;
  Problem with_radius(std::optional<double> radius_sq) const;

  const ProblemSpec& spec() const noexcept;
  const DiscreteReference& reference() const noexcept;
  const GammaGrid& gamma() const noexcept;
  std::size_t size() const noexcept;
  double delta() const noexcept { return delta_; }
  std::optional<double> radius_sq() const noexcept { return radius_sq_; }
  double mu() const noexcept;
  double sigma() const noexcept;

  /// True when the closed-form (concave) route applies.
  bool concave_path() const noexcept;
  /// Grid-moment eps_min = (mu_F - mu)^2 + (sigma_F - sigma)^2.
  double eps_min() const noexcept;
  /// Same quantity with the analytic moments of F; differs from eps_min()
  /// only by discretization of parametric references.
  double eps_min_continuous() const noexcept;

  /// Throws AssumptionA1Violated if sigma0 = 0.
  void require_a1() const;
  double rho() const;            // corr(F, gamma)
  double rho_effective() const;  // rho on the concave path, rho_hat otherwise
  double sigma0_hat() const;     // std(isotonic(gamma))

  /// Numerical A4 check on a default log grid of penalties; cached.
  const A4Report& default_a4_report() const;
  std::vector<double> default_a4_grid() const;

 private:
  struct Core;
  Problem(std::shared_ptr<const Core> core, double delta, std::optional<double> radius_sq)
      : core_(std::move(core)), delta_(delta), radius_sq_(radius_sq) {}

  std::shared_ptr<const Core> core_;
  double delta_;
  std::optional<double> radius_sq_;
};

/// The (possibly projected) score r_delta = iso(gamma + 2 delta F^{-1}) and
/// the quantile G_delta it induces after standardization to (mu, sigma).
struct FamilyMember {
  std::vector<double> score;
  double mean = 0.0;
  double sd = 0.0;
  bool projected = false;
};

FamilyMember family_member(const Problem& p, double delta);
QuantileGrid family_quantile(const Problem& p, double delta);

std::pair<double, double> epsilon_bounds(const Problem& p);

/// corr(F^{-1}, gamma + 2 delta F^{-1}) in closed form; concave path only.
double f_of_delta(const Problem& p, double delta);

/// corr(F^{-1}, r_delta) computed on the grid (either path).
double score_correlation(const Problem& p, double delta);

/// Penalty at which the unconstrained optimum lands exactly on the sphere
/// d^2 = eps. Requires eps in (eps_min, eps_max).
double delta_star(const Problem& p, double eps);

/// Distance of the unconstrained optimum for penalty delta.
double epsilon_star(const Problem& p, double delta);

Solution solve_moment_set(const Problem& p);
Solution solve_ball(const Problem& p);
/// Dispatches on the presence of a radius.
Solution solve(const Problem& p);

/// H_g(q) - delta d_W^2(F, q) for a grid with the target moments (1e-6).
double objective_eval(const Problem& p, std::span<const double> q);

/// Objective at the family member G_{delta_bar} for the problem's delta,
/// closed form; concave path only.
double objective_along_family(const Problem& p, double delta_bar);

/// Checks both monotonicity conditions over an increasing penalty grid.
A4Report check_assumption_a4(const Problem& p, std::span<const double> delta_grid);

}  // namespace drisk
