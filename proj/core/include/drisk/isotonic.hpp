#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace drisk {

struct IsotonicBlock {
  std::size_t start;  // first index, inclusive
  std::size_t end;    // one past the last index
  double level;       // mean of the input over [start, end)
};

struct IsotonicResult {
  std::vector<double> projected;
  std::vector<IsotonicBlock> blocks;
};

/// Least-squares projection of v onto the cone of non-decreasing vectors
/// under uniform weights (pool-adjacent-violators, O(n)).
IsotonicResult isotonic_project(std::span<const double> v);

/// (1/n) ||v - projected||^2.
double projection_gap(std::span<const double> v, const IsotonicResult& result);

}  // namespace drisk
