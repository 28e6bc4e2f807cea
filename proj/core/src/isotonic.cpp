#include "drisk/isotonic.hpp"

#include "drisk/errors.hpp"
#include "drisk/grid.hpp"

namespace drisk {

IsotonicResult isotonic_project(std::span<const double> v) {
  if (v.empty()) fail(ErrorCode::InvalidArgument, "isotonic projection of an empty vector");

  // Stack of pooled blocks, each stored by (start, count, sum).
  struct Pool {
    std::size_t start;
    std::size_t count;
    double sum;
    double level() const { return sum / static_cast<double>(count); }
  };
  std::vector<Pool> stack;
  stack.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    stack.push_back({i, 1, v[i]});
    while (stack.size() > 1 && stack[stack.size() - 2].level() > stack.back().level()) {
      const Pool top = stack.back();
      stack.pop_back();
      stack.back().count += top.count;
      stack.back().sum += top.sum;
    }
  }

  IsotonicResult out;
  out.projected.resize(v.size());
  out.blocks.reserve(stack.size());
  for (const Pool& p : stack) {
    // Level from an in-order sum over the block, so the result depends only
    // on the partition; singletons keep the input value bit-for-bit.
    double sum = 0.0;
    for (std::size_t i = p.start; i < p.start + p.count; ++i) sum += v[i];
    double level = p.count == 1 ? v[p.start] : sum / static_cast<double>(p.count);
    // Near-tied neighbours can round out of order by an ulp.
    if (!out.blocks.empty() && level < out.blocks.back().level) level = out.blocks.back().level;
    out.blocks.push_back({p.start, p.start + p.count, level});
    for (std::size_t i = p.start; i < p.start + p.count; ++i) out.projected[i] = level;
  }
  return out;
}

double projection_gap(std::span<const double> v, const IsotonicResult& result) {
  return wasserstein2_sq(v, result.projected);
}

}  // namespace drisk
