#pragma once

// Reference computations written independently of the library, used to
// cross-check it. Deliberately slow and simple.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "drisk/solver.hpp"

namespace drisk::testing {

inline std::string data_path(const std::string& name) { return std::string(DRISK_TEST_DATA_DIR) + "/" + name; }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

/// Inverse normal CDF by bisection on erfc.
inline double normal_quantile_bisect(double p) {
  double lo = -40.0;
  double hi = 40.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Midpoint rule (1/n) sum f((2i+1)/(2n)), accumulated in long double.
inline double midpoint_sum(const std::function<double(double)>& f, std::size_t n) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < n; ++i) acc += f((2.0 * i + 1.0) / (2.0 * n));
  return static_cast<double>(acc / n);
}

struct Moments {
  double mean;
  double sd;
};

inline Moments moments(const std::vector<double>& v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  const long double m = s / v.size();
  long double ss = 0.0L;
  for (double x : v) ss += (x - m) * (x - m);
  return {static_cast<double>(m), static_cast<double>(std::sqrt(ss / v.size()))};
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const Moments ma = moments(a);
  const Moments mb = moments(b);
  long double c = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) c += (a[i] - ma.mean) * (b[i] - mb.mean);
  return static_cast<double>(c / a.size() / (ma.sd * mb.sd));
}

inline double sq_distance(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return static_cast<double>(s / a.size());
}

/// Pool adjacent violators the slow way: merge the first violating pair of
/// blocks and rescan from the start until no pair violates.
inline std::vector<double> naive_pava(const std::vector<double>& v) {
  struct Block {
    std::size_t start, count;
  };
  const auto level = [&](const Block& b) {
    double s = 0.0;
    for (std::size_t i = b.start; i < b.start + b.count; ++i) s += v[i];
    return b.count == 1 ? v[b.start] : s / static_cast<double>(b.count);
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < v.size(); ++i) blocks.push_back({i, 1});
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t k = 0; k + 1 < blocks.size(); ++k) {
      if (level(blocks[k]) > level(blocks[k + 1])) {
        blocks[k].count += blocks[k + 1].count;
        blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(k) + 1);
        merged = true;
        break;
      }
    }
  }
  std::vector<double> out(v.size());
  for (const Block& b : blocks) {
    const double l = level(b);
    for (std::size_t i = b.start; i < b.start + b.count; ++i) out[i] = l;
  }
  return out;
}

inline std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

inline Problem normal_problem(DistortionSpec g, double delta, std::optional<double> eps = std::nullopt,
                              std::size_t n = kDefaultGridSize, SolverOptions options = {}) {
  return Problem(ProblemSpec{ReferenceDistribution::normal(0.0, 1.0), std::move(g), MomentTarget(0.0, 1.0),
                             PenaltySpec(delta), eps, n, options});
}

}  // namespace drisk::testing
