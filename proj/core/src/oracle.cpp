#include "drisk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "drisk/isotonic.hpp"

namespace drisk {

namespace {

constexpr int kMaxAttempts = 1000;
constexpr double kMinStep = 1e-12;
constexpr double kMinImprovement = 1e-12;

std::vector<double> mix(std::span<const double> a, std::span<const double> b, double lambda) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - lambda) * a[i] + lambda * b[i];
  return out;
}

double objective(const Problem& p, std::span<const double> q) {
  return distortion_value(p.gamma(), q) - p.delta() * wasserstein2_sq(p.reference().grid, q);
}

std::vector<double> aligned(const Problem& p) {
  return standardized(p.reference().grid, p.spec().target);
}

// Smallest mix weight (to bisection precision) that brings q inside the ball.
std::vector<double> shrink_into_ball(const Problem& p, std::vector<double> q, double eps) {
  const auto& f = p.reference().grid;
  if (wasserstein2_sq(f, q) <= eps) return q;
  const std::vector<double> a = aligned(p);
  const auto at = [&](double lambda) { return standardized(mix(q, a, lambda), p.spec().target); };
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> best = a;
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    std::vector<double> candidate = at(mid);
    if (wasserstein2_sq(f, candidate) <= eps) {
      hi = mid;
      best = std::move(candidate);
    } else {
      lo = mid;
    }
  }
  return best;
}

}  // namespace

QuantileGrid sample_feasible(const Problem& p, std::mt19937_64& rng) {
  const std::size_t n = p.size();
  if (n < 3) fail(ErrorCode::InvalidArgument, "sampling needs at least 3 cells");
  const std::vector<double> a = aligned(p);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);

  double lambda = unit(rng);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    // Increments exp^power give shapes from nearly linear to heavily skewed.
    const double power = 0.5 + 2.5 * unit(rng);
    std::vector<double> base(n);
    double acc = 0.0;
    for (auto& b : base) {
      acc += std::pow(expo(rng), power);
      b = acc;
    }
    if (!(grid_std(base) > 0.0)) continue;
    std::vector<double> q = standardized(mix(standardized(base, p.spec().target), a, lambda), p.spec().target);
    if (!p.radius_sq() || wasserstein2_sq(p.reference().grid, q) <= *p.radius_sq()) {
      return QuantileGrid(std::move(q));
    }
    lambda = 0.5 * (1.0 + lambda);
  }
  fail(ErrorCode::SamplingExhausted, "no feasible sample after 1000 attempts; ball too tight");
}

QuantileGrid project_feasible(const Problem& p, std::span<const double> v) {
  std::vector<double> q = isotonic_project(v).projected;
  if (!(grid_std(q) > 0.0)) q = aligned(p);
  q = standardized(q, p.spec().target);
  if (p.radius_sq()) q = shrink_into_ball(p, std::move(q), *p.radius_sq());
  return QuantileGrid(std::move(q));
}

QuantileGrid projected_ascent(const Problem& p, const QuantileGrid& start, const OracleConfig& cfg) {
  const auto& gamma = p.gamma().weights;
  const auto& f = p.reference().grid;
  QuantileGrid q = start;
  double value = objective(p, q);
  double step = cfg.step;
  std::vector<double> trial(q.size());
  for (std::size_t it = 0; it < cfg.ascent_iters; ++it) {
    bool moved = false;
    for (; step > kMinStep; step *= 0.5) {
      for (std::size_t i = 0; i < trial.size(); ++i) {
        trial[i] = q[i] + step * (gamma[i] + 2.0 * p.delta() * (f[i] - q[i]));
      }
      QuantileGrid next = project_feasible(p, trial);
      const double next_value = objective(p, next);
      if (next_value > value) {
        const double improvement = next_value - value;
        q = std::move(next);
        value = next_value;
        moved = improvement >= kMinImprovement;
        step *= 2.0;
        break;
      }
    }
    if (!moved) break;
  }
  return q;
}

OracleReport verify(const Problem& p, const OracleConfig& cfg) {
  if (cfg.samples == 0 || cfg.ascent_iters == 0 || !(cfg.step > 0.0)) {
    fail(ErrorCode::InvalidArgument, "oracle samples, iterations and step must be positive");
  }
  const Solution sol = solve(p);
  const double closed = sol.value + cfg.corrupt_offset;
  const double limit = closed + cfg.violation_tolerance;

  std::mt19937_64 rng(cfg.seed);
  std::size_t violations = 0;
  // Best few samples seed the ascent runs; kept sorted by value, descending.
  std::vector<std::pair<double, QuantileGrid>> top;
  const std::size_t keep = std::max<std::size_t>(cfg.ascent_runs, 1);
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    QuantileGrid q = sample_feasible(p, rng);
    const double v = objective(p, q);
    if (v > limit) ++violations;
    if (top.size() < keep || v > top.back().first) {
      auto pos = std::find_if(top.begin(), top.end(), [v](const auto& e) { return v > e.first; });
      top.insert(pos, {v, std::move(q)});
      if (top.size() > keep) top.pop_back();
    }
  }

  OracleReport report{top.front().first, top.front().second, closed, 0.0, 0, cfg.samples, sol.regime, false};
  for (std::size_t r = 0; r < std::min(cfg.ascent_runs, top.size()); ++r) {
    QuantileGrid q = projected_ascent(p, top[r].second, cfg);
    const double v = objective(p, q);
    if (v > limit) ++violations;
    if (v > report.best_value) {
      report.best_value = v;
      report.best_grid = std::move(q);
    }
  }
  report.violations = violations;
  report.gap = closed - report.best_value;
  report.passed = violations == 0 && report.gap <= cfg.gap_tolerance;
  if (!report.passed) {
    std::ostringstream os;
    os.precision(12);
    os << "oracle disagrees with solver: closed form " << closed << ", best feasible " << report.best_value
       << ", violations " << violations;
    throw VerificationError(os.str(), std::move(report));
  }
  return report;
}

}  // namespace drisk
