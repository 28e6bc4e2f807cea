#include "drisk/solver.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "drisk/errors.hpp"
#include "drisk/isotonic.hpp"

namespace drisk {

namespace {

constexpr double kRhoDegenerate = 1.0 - 1e-9;
constexpr double kRegimeTolerance = 1e-9;
constexpr double kMomentValueTolerance = 1e-9;
constexpr double kBoundaryValueTolerance = 1e-8;
constexpr double kA4Tolerance = 1e-12;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

std::vector<double> score_vector(const GammaGrid& gamma, const DiscreteReference& ref, double delta) {
  std::vector<double> s(gamma.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = gamma.weights[i] + 2.0 * delta * ref.grid[i];
  return s;
}

}  // namespace

PenaltySpec::PenaltySpec(double delta) : delta_(delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    fail(ErrorCode::InvalidArgument, "penalty delta must be finite and >= 0");
  }
}

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::Infeasible: return "Infeasible";
    case Regime::Degenerate: return "Degenerate";
    case Regime::Interior: return "Interior";
    case Regime::Boundary: return "Boundary";
    case Regime::Unconstrained: return "Unconstrained";
    case Regime::MomentOnly: return "MomentOnly";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Problem

struct Problem::Core {
  Core(const ProblemSpec& s, DiscreteReference r, GammaGrid g)
      : spec(s), ref(std::move(r)), gamma(std::move(g)) {}

  ProblemSpec spec;
  DiscreteReference ref;
  GammaGrid gamma;
  double eps_min = 0.0;
  double eps_min_cont = 0.0;
  bool concave_path = false;
  std::optional<double> rho;
  std::vector<double> gamma_hat;  // isotonic projection of gamma
  double sigma0_hat = 0.0;
  std::optional<double> rho_hat;

  mutable std::once_flag a4_once;
  mutable A4Report a4;
};

namespace {

void check_radius(std::optional<double> radius_sq) {
  if (!radius_sq) return;
  if (!std::isfinite(*radius_sq)) fail(ErrorCode::InvalidArgument, "radius must be finite");
  if (*radius_sq < 0.0) {
    fail(ErrorCode::InfeasibleRadius, "epsilon below eps_min: set is empty");
  }
}

}  // namespace

Problem::Problem(const ProblemSpec& spec)
    : delta_(spec.penalty.delta()), radius_sq_(spec.radius_sq) {
  check_radius(radius_sq_);
  if (spec.distortion.is_var() && !spec.options.allow_var) {
    fail(ErrorCode::VaRRefused,
         "VaR weights are a single spike whose height grows with the grid, so square "
         "integrability of gamma fails and results depend on the discretization; "
         "set allow_var (--allow-var) to proceed anyway");
  }
  auto core = std::make_shared<Core>(spec, discretize(spec.reference, spec.grid_size),
                                     gamma_grid(spec.distortion, spec.grid_size));
  const double mu = spec.target.mu();
  const double sigma = spec.target.sigma();
  auto sq = [](double x) { return x * x; };
  core->eps_min = sq(core->ref.mean - mu) + sq(core->ref.sd - sigma);
  core->eps_min_cont = sq(spec.reference.mean() - mu) + sq(spec.reference.stddev() - sigma);
  core->concave_path = core->gamma.is_concave && !spec.options.force_general;
  if (core->gamma.satisfies_a1) {
    core->rho = corr(core->ref.grid, core->gamma.weights);
    core->gamma_hat = isotonic_project(core->gamma.weights).projected;
    core->sigma0_hat = grid_std(core->gamma_hat);
    if (core->sigma0_hat > kSigma0Floor) core->rho_hat = corr(core->ref.grid, core->gamma_hat);
  }
  core_ = std::move(core);
}

Problem Problem::with_delta(double delta) const {
  return Problem(core_, PenaltySpec(delta).delta(), radius_sq_);
}

Problem Problem::with_radius(std::optional<double> radius_sq) const {
  check_radius(radius_sq);
  return Problem(core_, delta_, radius_sq);
}

const ProblemSpec& Problem::spec() const noexcept { return core_->spec; }
const DiscreteReference& Problem::reference() const noexcept { return core_->ref; }
const GammaGrid& Problem::gamma() const noexcept { return core_->gamma; }
std::size_t Problem::size() const noexcept { return core_->gamma.size(); }
double Problem::mu() const noexcept { return core_->spec.target.mu(); }
double Problem::sigma() const noexcept { return core_->spec.target.sigma(); }
bool Problem::concave_path() const noexcept { return core_->concave_path; }
double Problem::eps_min() const noexcept { return core_->eps_min; }
double Problem::eps_min_continuous() const noexcept { return core_->eps_min_cont; }

void Problem::require_a1() const {
  if (!core_->gamma.satisfies_a1) {
    fail(ErrorCode::AssumptionA1Violated, "sigma0 = 0: Assumption 2.1 fails");
  }
}

double Problem::rho() const {
  require_a1();
  return *core_->rho;
}

double Problem::sigma0_hat() const {
  require_a1();
  return core_->sigma0_hat;
}

double Problem::rho_effective() const {
  require_a1();
  if (core_->concave_path) return *core_->rho;
  if (!core_->rho_hat) {
    fail(ErrorCode::DegenerateProjection, "isotonic projection of gamma is constant (sigma0_hat = 0)");
  }
  return *core_->rho_hat;
}

std::vector<double> Problem::default_a4_grid() const {
  require_a1();
  const double scale = core_->gamma.sigma0 / (2.0 * core_->ref.sd);
  constexpr int kPoints = 31;
  std::vector<double> grid(kPoints);
  for (int k = 0; k < kPoints; ++k) grid[k] = scale * std::pow(10.0, -3.0 + 6.0 * k / (kPoints - 1));
  return grid;
}

const A4Report& Problem::default_a4_report() const {
  std::call_once(core_->a4_once, [this] {
    if (!core_->gamma.satisfies_a1) {
      core_->a4.applicable = false;
      return;
    }
    core_->a4 = check_assumption_a4(*this, default_a4_grid());
  });
  return core_->a4;
}

// ---------------------------------------------------------------------------
// Family of candidate optima

FamilyMember family_member(const Problem& p, double delta) {
  FamilyMember m;
  m.score = score_vector(p.gamma(), p.reference(), delta);
  if (!p.concave_path() || !is_non_decreasing(m.score)) {
    m.score = isotonic_project(m.score).projected;
    m.projected = true;
  }
  m.mean = grid_mean(m.score);
  m.sd = grid_std(m.score);
  return m;
}

QuantileGrid family_quantile(const Problem& p, double delta) {
  const FamilyMember m = family_member(p, delta);
  if (!(m.sd > 0.0)) fail(ErrorCode::DegenerateProjection, "projected score is constant");
  return QuantileGrid(standardized(m.score, p.spec().target));
}

std::pair<double, double> epsilon_bounds(const Problem& p) {
  const double rho = p.rho_effective();
  return {p.eps_min(), p.eps_min() + 2.0 * p.sigma() * p.reference().sd * (1.0 - rho)};
}

double f_of_delta(const Problem& p, double delta) {
  if (!p.concave_path()) fail(ErrorCode::NotConcave, "closed-form correlation needs concave weights");
  if (!(delta >= 0.0)) fail(ErrorCode::InvalidArgument, "delta must be >= 0");
  const double s0 = p.gamma().sigma0;
  const double sf = p.reference().sd;
  const double rho = p.rho();
  const double num = 2.0 * delta * sf * sf + s0 * sf * rho;
  const double den = sf * std::sqrt(s0 * s0 + 4.0 * delta * delta * sf * sf + 4.0 * delta * s0 * sf * rho);
  return std::min(1.0, num / den);
}

double score_correlation(const Problem& p, double delta) {
  p.require_a1();
  const FamilyMember m = family_member(p, delta);
  if (!(m.sd > 0.0)) fail(ErrorCode::DegenerateProjection, "projected score is constant");
  return corr(p.reference().grid, m.score);
}

namespace {

double closed_form_delta_star(const Problem& p, double eps) {
  const double s0 = p.gamma().sigma0;
  const double sf = p.reference().sd;
  const double ss = p.sigma() * sf;
  const double rho = p.rho();
  const double emin = p.eps_min();
  // Positive root of the quadratic f(delta) = 1 - (eps - eps_min) / (2 sigma sigma_F).
  return -s0 * rho / (2.0 * sf) +
         s0 * (emin + 2.0 * ss - eps) * std::sqrt(1.0 - rho * rho) /
             (2.0 * sf * std::sqrt((emin + 4.0 * ss - eps) * (eps - emin)));
}

double bisect_delta_star(const Problem& p, double eps) {
  const double target = 1.0 - (eps - p.eps_min()) / (2.0 * p.sigma() * p.reference().sd);
  const auto c = [&](double d) { return score_correlation(p, d); };
  const auto non_monotone = [](double lo, double hi) {
    fail(ErrorCode::AssumptionA4Violated,
         "corr(F, projected score) is not increasing in delta between " + fmt(lo) + " and " + fmt(hi));
  };

  double lo = 0.0;
  double c_lo = c(lo);
  double hi = 1.0;
  double c_hi = c(hi);
  for (int k = 0; c_hi < target; ++k) {
    if (c_hi < c_lo - kA4Tolerance) non_monotone(lo, hi);
    if (k > 1000 || !std::isfinite(hi * 2.0)) {
      fail(ErrorCode::RadiusOutOfRange, "radius too close to eps_min to bracket the threshold");
    }
    lo = hi;
    c_lo = c_hi;
    hi *= 2.0;
    c_hi = c(hi);
  }
  while (hi - lo > 1e-15 * hi) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double c_mid = c(mid);
    if (c_mid < c_lo - kA4Tolerance || c_mid > c_hi + kA4Tolerance) non_monotone(lo, hi);
    if (c_mid < target) {
      lo = mid;
      c_lo = c_mid;
    } else {
      hi = mid;
      c_hi = c_mid;
    }
  }
  return std::abs(c_lo - target) < std::abs(c_hi - target) ? lo : hi;
}

}  // namespace

double delta_star(const Problem& p, double eps) {
  const double rho = p.rho_effective();
  if (rho >= kRhoDegenerate) {
    fail(ErrorCode::RhoDegenerate, "rho = 1: the distance of the optimum does not depend on delta");
  }
  const auto [emin, emax] = epsilon_bounds(p);
  if (!(eps > emin && eps < emax)) {
    fail(ErrorCode::RadiusOutOfRange,
         "radius " + fmt(eps) + " outside (eps_min, eps_max) = (" + fmt(emin) + ", " + fmt(emax) + ")");
  }
  return p.concave_path() ? closed_form_delta_star(p, eps) : bisect_delta_star(p, eps);
}

double epsilon_star(const Problem& p, double delta) {
  if (!(delta >= 0.0)) fail(ErrorCode::InvalidArgument, "delta must be >= 0");
  p.require_a1();
  const double c = p.concave_path() ? f_of_delta(p, delta) : score_correlation(p, delta);
  return p.eps_min() + 2.0 * p.sigma() * p.reference().sd * (1.0 - c);
}

// ---------------------------------------------------------------------------
// Solutions

namespace {

SolverDiagnostics base_diagnostics(const Problem& p) {
  SolverDiagnostics d;
  d.eps_min = p.eps_min();
  d.sigma0 = p.gamma().sigma0;
  d.concave = p.concave_path();
  d.rho = p.rho_effective();
  d.eps_max = epsilon_bounds(p).second;
  return d;
}

Solution finish(const Problem& p, Regime regime, std::vector<double> quantile, double closed_value,
                double tolerance, SolverDiagnostics diag) {
  Solution s{regime, QuantileGrid(std::move(quantile)), 0.0, 0.0, 0.0, std::move(diag)};
  s.risk_part = distortion_value(p.gamma(), s.optimal_quantile);
  s.achieved_distance_sq = wasserstein2_sq(p.reference().grid, s.optimal_quantile);
  s.value = s.risk_part - p.delta() * s.achieved_distance_sq;
  const double scale =
      std::max({1.0, std::abs(s.risk_part), p.delta() * s.achieved_distance_sq, std::abs(closed_value)});
  if (std::abs(s.value - closed_value) > tolerance * scale) {
    fail(ErrorCode::InternalError, "closed-form value " + fmt(closed_value) +
                                       " disagrees with grid objective " + fmt(s.value) + " (" +
                                       std::string(to_string(regime)) + ")");
  }
  return s;
}

Solution solve_unconstrained(const Problem& p, Regime regime) {
  SolverDiagnostics diag = base_diagnostics(p);
  if (!p.concave_path() && !(p.sigma0_hat() > kSigma0Floor)) {
    fail(ErrorCode::DegenerateProjection, "isotonic projection of gamma is constant (sigma0_hat = 0)");
  }
  const FamilyMember m = family_member(p, p.delta());
  if (!(m.sd > 0.0)) fail(ErrorCode::DegenerateProjection, "projected score is constant");
  diag.sigma_delta = m.sd;
  diag.mu_delta = m.mean;
  diag.used_isotonic = m.projected;

  const double ss = p.sigma() * p.reference().sd;
  const double closed = p.mu() - p.delta() * (p.eps_min() + 2.0 * ss) + p.sigma() * m.sd;
  Solution s = finish(p, regime, standardized(m.score, p.spec().target), closed,
                      kMomentValueTolerance, std::move(diag));
  s.diagnostics.eps_star = s.achieved_distance_sq;
  return s;
}

Solution solve_degenerate(const Problem& p, SolverDiagnostics diag) {
  // The only member of the ball: F rescaled to the target moments.
  const double closed =
      p.mu() + p.sigma() * p.gamma().sigma0 * p.rho() - p.delta() * p.eps_min();
  diag.sigma_delta = p.reference().sd;
  diag.mu_delta = p.reference().mean;
  return finish(p, Regime::Degenerate, standardized(p.reference().grid, p.spec().target), closed,
                kBoundaryValueTolerance, std::move(diag));
}

}  // namespace

Solution solve_moment_set(const Problem& p) {
  p.require_a1();
  return solve_unconstrained(p, Regime::MomentOnly);
}

Solution solve_ball(const Problem& p) {
  if (!p.radius_sq()) fail(ErrorCode::InvalidArgument, "ball problem needs a radius");
  p.require_a1();
  const double eps = *p.radius_sq();

  // eps_min from grid moments and from analytic moments can differ by the
  // discretization error; radii between the two are treated as eps_min.
  const double emin = p.eps_min();
  const double tol = kRegimeTolerance * std::max(1.0, emin);
  const double band_lo = std::min(emin, p.eps_min_continuous()) - tol;
  const double band_hi = std::max(emin, p.eps_min_continuous()) + tol;
  if (eps < band_lo) fail(ErrorCode::InfeasibleRadius, "epsilon below eps_min: set is empty");

  SolverDiagnostics diag = base_diagnostics(p);
  if (eps <= band_hi) return solve_degenerate(p, std::move(diag));

  if (diag.rho >= kRhoDegenerate) {
    diag.warnings.emplace_back("rho = 1: the ball problem is trivial; returning the F-aligned quantile");
    return solve_degenerate(p, std::move(diag));
  }
  if (eps >= diag.eps_max) {
    Solution s = solve_unconstrained(p, Regime::Unconstrained);
    return s;
  }

  if (!p.concave_path() && !p.default_a4_report().passed()) {
    fail(ErrorCode::AssumptionA4Violated,
         "monotonicity of the projected-score correlations fails on the default penalty grid");
  }
  const double dstar = delta_star(p, eps);
  if (p.delta() >= dstar) {
    Solution s = solve_unconstrained(p, Regime::Interior);
    s.diagnostics.delta_star = dstar;
    return s;
  }

  // Boundary: the optimum is the family member at delta*, which sits on the sphere.
  const FamilyMember star = family_member(p, dstar);
  diag.sigma_delta = star.sd;
  diag.mu_delta = star.mean;
  diag.used_isotonic = star.projected;
  diag.delta_star = dstar;
  diag.eps_star = epsilon_star(p, p.delta());

  const double delta = p.delta();
  const double sf = p.reference().sd;
  const double ss = p.sigma() * sf;
  double coupling;  // sigma_delta * corr(gamma + 2 delta F, r_{delta*})
  if (p.concave_path()) {
    const double s0 = p.gamma().sigma0;
    const double rho = p.rho();
    const double sd_star = std::sqrt(s0 * s0 + 4.0 * dstar * dstar * sf * sf + 4.0 * dstar * s0 * sf * rho);
    coupling = (s0 * s0 + 2.0 * (delta + dstar) * s0 * sf * rho + 4.0 * delta * dstar * sf * sf) / sd_star;
  } else {
    const std::vector<double> score = score_vector(p.gamma(), p.reference(), delta);
    coupling = grid_std(score) * corr(score, star.score);
  }
  const double closed = p.mu() - delta * (p.eps_min() + 2.0 * ss) + p.sigma() * coupling;
  return finish(p, Regime::Boundary, standardized(star.score, p.spec().target), closed,
                kBoundaryValueTolerance, std::move(diag));
}

Solution solve(const Problem& p) { return p.radius_sq() ? solve_ball(p) : solve_moment_set(p); }

double objective_eval(const Problem& p, std::span<const double> q) {
  if (q.size() != p.size()) fail(ErrorCode::GridSizeMismatch, "grid size differs from the problem's");
  const double m = grid_mean(q);
  const double s = grid_std(q);
  if (std::abs(m - p.mu()) > 1e-6 * std::max(1.0, std::abs(p.mu())) ||
      std::abs(s - p.sigma()) > 1e-6 * std::max(1.0, p.sigma())) {
    fail(ErrorCode::MomentMismatch, "candidate grid does not have the target moments");
  }
  return distortion_value(p.gamma(), q) - p.delta() * wasserstein2_sq(p.reference().grid, q);
}

double objective_along_family(const Problem& p, double delta_bar) {
  if (!p.concave_path()) fail(ErrorCode::NotConcave, "family objective closed form needs concave weights");
  if (!(delta_bar >= 0.0)) fail(ErrorCode::InvalidArgument, "delta_bar must be >= 0");
  const double s0 = p.gamma().sigma0;
  const double sf = p.reference().sd;
  const double rho = p.rho();
  const double sigma = p.sigma();
  const double delta = p.delta();
  const double sd_bar =
      std::sqrt(s0 * s0 + 4.0 * delta_bar * delta_bar * sf * sf + 4.0 * delta_bar * s0 * sf * rho);
  const double h = sigma * sd_bar +
                   2.0 * (delta - delta_bar) * sigma / sd_bar * (2.0 * delta_bar * sf * sf + s0 * sf * rho);
  return p.mu() - delta * (p.eps_min() + 2.0 * sigma * sf) + h;
}

A4Report check_assumption_a4(const Problem& p, std::span<const double> delta_grid) {
  A4Report report;
  if (!p.gamma().satisfies_a1) {
    report.applicable = false;
    return report;
  }
  for (std::size_t k = 0; k < delta_grid.size(); ++k) {
    if (!(delta_grid[k] > 0.0) || (k > 0 && !(delta_grid[k] > delta_grid[k - 1]))) {
      fail(ErrorCode::InvalidArgument, "penalty grid must be positive and strictly increasing");
    }
  }
  report.deltas.assign(delta_grid.begin(), delta_grid.end());

  std::vector<std::vector<double>> projected;
  projected.reserve(delta_grid.size());
  for (double d : delta_grid) {
    FamilyMember m = family_member(p, d);
    if (!(m.sd > 0.0)) fail(ErrorCode::DegenerateProjection, "projected score is constant");
    report.corr_a.push_back(corr(p.reference().grid, m.score));
    projected.push_back(std::move(m.score));
  }

  for (std::size_t k = 1; k < delta_grid.size(); ++k) {
    if (report.corr_a[k] < report.corr_a[k - 1] - kA4Tolerance) {
      report.holds_a = false;
      report.violation_a = std::pair{delta_grid[k - 1], delta_grid[k]};
      break;
    }
  }

  for (std::size_t j = 0; j < delta_grid.size() && report.holds_b; ++j) {
    const std::vector<double> score = score_vector(p.gamma(), p.reference(), delta_grid[j]);
    double prev = 0.0;
    for (std::size_t k = j + 1; k < delta_grid.size(); ++k) {
      const double c = corr(score, projected[k]);
      if (k > j + 1 && c > prev + kA4Tolerance) {
        report.holds_b = false;
        report.violation_b = std::pair{delta_grid[j], delta_grid[k]};
        break;
      }
      prev = c;
    }
  }
  return report;
}

}  // namespace drisk
