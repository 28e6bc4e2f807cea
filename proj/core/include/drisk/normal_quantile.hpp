#pragma once

namespace drisk {

/// Standard normal quantile Phi^{-1}(p) by Wichura's AS241 (PPND16) rational
/// approximations; relative accuracy about 1e-16 on (0,1). Returns -inf/+inf
/// at p = 0/1 and NaN outside [0,1].
double normal_quantile(double p) noexcept;

}  // namespace drisk
