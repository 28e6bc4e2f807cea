#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

#include "drisk/errors.hpp"
#include "drisk/grid.hpp"
#include "drisk/solver.hpp"

namespace drisk {

/// Brute-force check of the solver on the discretized problem. Sampling and
/// ascent only produce feasible points, so they give lower bounds on the
/// optimum: none may beat the solver, and the best should come close.
struct OracleConfig {
  std::size_t samples = 10'000;
  std::size_t ascent_iters = 500;
  std::size_t ascent_runs = 10;
  double step = 0.1;
  std::uint64_t seed = 20240901;
  double gap_tolerance = 1e-2;
  double violation_tolerance = 1e-9;
  /// Added to the solver value before comparing; a nonzero value must make
  /// verification fail (harness self-test).
  double corrupt_offset = 0.0;
};

struct OracleReport {
  double best_value = 0.0;
  QuantileGrid best_grid;
  double closed_form_value = 0.0;
  double gap = 0.0;  // closed_form_value - best_value
  std::size_t violations = 0;
  std::size_t samples = 0;
  Regime regime = Regime::MomentOnly;
  bool passed = false;
};

/// Raised by verify() on failure; carries the full report, including the
/// best grid found.
class VerificationError : public Error {
 public:
  VerificationError(const std::string& message, OracleReport report)
      : Error(ErrorCode::VerificationFailed, message), report_(std::move(report)) {}
  const OracleReport& report() const noexcept { return report_; }

 private:
  OracleReport report_;
};

/// Random point of the feasible set: a random increasing shape mixed with the
/// F-aligned grid, standardized to the target moments. With a radius the mix
/// weight is pushed toward 1 until the point lies in the ball.
QuantileGrid sample_feasible(const Problem& p, std::mt19937_64& rng);

/// Projection onto the feasible set used by the ascent: isotonic projection,
/// standardization, then (with a radius) shrinking toward the F-aligned grid.
QuantileGrid project_feasible(const Problem& p, std::span<const double> v);

/// Gradient ascent with projection; never returns a worse point than start.
QuantileGrid projected_ascent(const Problem& p, const QuantileGrid& start, const OracleConfig& cfg);

/// Runs sampling and ascent against solve(p). Throws VerificationError when a
/// feasible point beats the solver or the ascent falls short by more than
/// gap_tolerance.
OracleReport verify(const Problem& p, const OracleConfig& cfg = {});

}  // namespace drisk
