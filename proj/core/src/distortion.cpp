#include "drisk/distortion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

#include "drisk/errors.hpp"
#include "drisk/samples_csv.hpp"

namespace drisk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void invalid(const std::string& what) { fail(ErrorCode::InvalidDistortion, what); }

void check_level(double alpha, const char* name) {
  if (!(alpha > 0.0 && alpha < 1.0)) invalid(std::string(name) + " level must lie in (0,1)");
}

double piecewise_value(const PiecewiseLinearDistortion& p, double x) {
  const auto& k = p.knots;
  if (x <= k.front().first) return k.front().second;
  if (x >= k.back().first) return k.back().second;
  const auto it = std::upper_bound(k.begin(), k.end(), x,
                                   [](double v, const auto& knot) { return v < knot.first; });
  const auto& [x1, y1] = *it;
  const auto& [x0, y0] = *(it - 1);
  return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

double table_value(const GammaTableDistortion& t, double x) {
  // g(x) = integral of gamma over u in [1 - x, 1].
  const std::size_t m = t.weights.size();
  const double lo = (1.0 - x) * static_cast<double>(m);
  double mass = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = std::max(lo, static_cast<double>(i));
    const double b = static_cast<double>(i + 1);
    if (b > a) mass += t.weights[i] * (b - a);
  }
  return mass / static_cast<double>(m);
}

std::vector<double> cvar_weights(double alpha, std::size_t n) {
  std::vector<double> w(n, 0.0);
  const double top = 1.0 / (1.0 - alpha);
  const auto nd = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = static_cast<double>(i) / nd;
    const double b = static_cast<double>(i + 1) / nd;
    if (a >= alpha) {
      w[i] = top;
    } else if (b > alpha) {
      w[i] = nd * (b - alpha) * top;
    }
  }
  return w;
}

std::vector<double> piecewise_weights(const PiecewiseLinearDistortion& p, std::size_t n) {
  // Cell i covers u in [i/n, (i+1)/n], i.e. x = 1 - u in [1 - (i+1)/n, 1 - i/n].
  const auto& k = p.knots;
  const auto nd = static_cast<double>(n);
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x_lo = 1.0 - static_cast<double>(i + 1) / nd;
    const double x_hi = 1.0 - static_cast<double>(i) / nd;
    double mass = 0.0;
    std::optional<double> single_segment_slope;
    for (std::size_t s = 0; s + 1 < k.size(); ++s) {
      const double lo = std::max(x_lo, k[s].first);
      const double hi = std::min(x_hi, k[s + 1].first);
      if (hi <= lo) continue;
      const double slope = (k[s + 1].second - k[s].second) / (k[s + 1].first - k[s].first);
      if (lo == x_lo && hi == x_hi) {
        single_segment_slope = slope;
        break;
      }
      mass += slope * (hi - lo);
    }
    w[i] = single_segment_slope ? *single_segment_slope : nd * mass;
  }
  return w;
}

std::vector<double> increment_weights(const std::function<double(double)>& tail, std::size_t n) {
  // tail(v) = 1 - g(1 - v); weight i = n [tail((i+1)/n) - tail(i/n)].
  const auto nd = static_cast<double>(n);
  std::vector<double> w(n);
  double prev = tail(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double next = tail(static_cast<double>(i + 1) / nd);
    w[i] = nd * (next - prev);
    prev = next;
  }
  return w;
}

double parse_double(std::string_view s, std::string_view what) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    fail(ErrorCode::ParseError, "bad number '" + std::string(s) + "' in " + std::string(what));
  }
  return v;
}

}  // namespace

DistortionSpec DistortionSpec::cvar(double alpha) {
  check_level(alpha, "CVaR");
  return DistortionSpec(CVaRDistortion{alpha});
}

DistortionSpec DistortionSpec::var(double alpha) {
  check_level(alpha, "VaR");
  return DistortionSpec(VaRDistortion{alpha});
}

DistortionSpec DistortionSpec::dual_power(double beta) {
  if (!(beta >= 1.0) || !std::isfinite(beta)) invalid("dual power exponent must be >= 1");
  return DistortionSpec(DualPowerDistortion{beta});
}

DistortionSpec DistortionSpec::piecewise(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) invalid("piecewise distortion needs at least two knots");
  if (knots.front() != std::pair{0.0, 0.0} || knots.back() != std::pair{1.0, 1.0}) {
    invalid("piecewise distortion must start at (0,0) and end at (1,1)");
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i].first > knots[i - 1].first)) invalid("piecewise knots: x must be strictly increasing");
    if (knots[i].second < knots[i - 1].second) invalid("piecewise knots: g must be non-decreasing");
  }
  return DistortionSpec(PiecewiseLinearDistortion{std::move(knots)});
}

DistortionSpec DistortionSpec::gamma_table(std::vector<double> weights) {
  if (weights.size() < 2) invalid("gamma table needs at least two weights");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) invalid("gamma table weights must be finite and nonnegative");
  }
  if (std::abs(grid_mean(weights) - 1.0) > 1e-9) invalid("gamma table weights must average to 1");
  return DistortionSpec(GammaTableDistortion{std::move(weights)});
}

DistortionSpec DistortionSpec::function(std::string name, std::function<double(double)> g) {
  if (!g) invalid("distortion function is empty");
  if (g(0.0) != 0.0 || g(1.0) != 1.0) invalid("distortion must satisfy g(0) = 0 and g(1) = 1");
  constexpr int kProbe = 1000;
  double prev = 0.0;
  for (int i = 1; i <= kProbe; ++i) {
    const double v = g(static_cast<double>(i) / kProbe);
    if (!std::isfinite(v) || v < prev) invalid("distortion must be non-decreasing on [0,1]");
    prev = v;
  }
  return DistortionSpec(FunctionDistortion{std::move(name), std::move(g)});
}

DistortionSpec DistortionSpec::smoothstep() {
  return function("smoothstep", [](double x) { return x * x * (3.0 - 2.0 * x); });
}

double DistortionSpec::operator()(double x) const {
  x = std::clamp(x, 0.0, 1.0);
  return std::visit(
      overloaded{
          [x](const CVaRDistortion& d) { return std::min(x / (1.0 - d.alpha), 1.0); },
          [x](const VaRDistortion& d) { return x > 1.0 - d.alpha ? 1.0 : 0.0; },
          [x](const DualPowerDistortion& d) { return 1.0 - std::pow(1.0 - x, d.beta); },
          [x](const PiecewiseLinearDistortion& d) { return piecewise_value(d, x); },
          [x](const GammaTableDistortion& d) { return table_value(d, x); },
          [x](const FunctionDistortion& d) { return d.g(x); },
      },
      kind_);
}

std::string DistortionSpec::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const CVaRDistortion& d) { os << "cvar:" << format_number(d.alpha); },
                 [&](const VaRDistortion& d) { os << "var:" << format_number(d.alpha); },
                 [&](const DualPowerDistortion& d) { os << "dualpower:" << format_number(d.beta); },
                 [&](const PiecewiseLinearDistortion& d) {
                   os << "piecewise:";
                   for (std::size_t i = 0; i < d.knots.size(); ++i) {
                     os << (i ? ";" : "") << format_number(d.knots[i].first) << ',' << format_number(d.knots[i].second);
                   }
                 },
                 [&](const GammaTableDistortion& d) { os << "gammatable[" << d.weights.size() << ']'; },
                 [&](const FunctionDistortion& d) { os << d.name; },
             },
             kind_);
  return os.str();
}

DistortionSpec parse_distortion(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view body = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

  if (head == "smoothstep" && body.empty()) return DistortionSpec::smoothstep();
  if (colon == std::string_view::npos) {
    fail(ErrorCode::ParseError, "distortion spec needs the form kind:params, got '" + std::string(text) + "'");
  }
  if (head == "cvar") return DistortionSpec::cvar(parse_double(body, "cvar level"));
  if (head == "var") return DistortionSpec::var(parse_double(body, "var level"));
  if (head == "dualpower") return DistortionSpec::dual_power(parse_double(body, "dualpower exponent"));
  if (head == "gammafile") return DistortionSpec::gamma_table(read_weights_csv(std::string(body)));
  if (head == "piecewise") {
    std::vector<std::pair<double, double>> knots;
    std::size_t start = 0;
    while (start <= body.size()) {
      const auto semi = body.find(';', start);
      const std::string_view pair = body.substr(start, semi - start);
      const auto comma = pair.find(',');
      if (comma == std::string_view::npos) {
        fail(ErrorCode::ParseError, "piecewise knot '" + std::string(pair) + "' is not x,y");
      }
      knots.emplace_back(parse_double(pair.substr(0, comma), "piecewise knot"),
                         parse_double(pair.substr(comma + 1), "piecewise knot"));
      if (semi == std::string_view::npos) break;
      start = semi + 1;
    }
    return DistortionSpec::piecewise(std::move(knots));
  }
  fail(ErrorCode::ParseError, "unknown distortion kind '" + std::string(head) + "'");
}

GammaGrid gamma_grid(const DistortionSpec& g, std::size_t n) {
  if (n < 2) invalid("grid size must be at least 2");
  GammaGrid out;
  out.weights = std::visit(
      overloaded{
          [n](const CVaRDistortion& d) { return cvar_weights(d.alpha, n); },
          [n](const VaRDistortion& d) {
            return increment_weights([a = d.alpha](double v) { return v >= a ? 1.0 : 0.0; }, n);
          },
          [n](const DualPowerDistortion& d) {
            // n [((i+1)/n)^b - (i/n)^b] in integer form; exactly 1 for b = 1.
            std::vector<double> w(n);
            const double scale = std::pow(static_cast<double>(n), d.beta - 1.0);
            for (std::size_t i = 0; i < n; ++i) {
              const auto k = static_cast<double>(i);
              w[i] = (std::pow(k + 1.0, d.beta) - std::pow(k, d.beta)) / scale;
            }
            return w;
          },
          [n](const PiecewiseLinearDistortion& d) { return piecewise_weights(d, n); },
          [n](const GammaTableDistortion& d) {
            if (d.weights.size() != n) {
              invalid("gamma table has " + std::to_string(d.weights.size()) +
                      " weights but the grid has " + std::to_string(n) + " cells");
            }
            return d.weights;
          },
          [n](const FunctionDistortion& d) {
            return increment_weights([&d](double v) { return 1.0 - d.g(1.0 - v); }, n);
          },
      },
      g.kind());

  for (double& w : out.weights) {
    if (w < 0.0) {
      if (w < -1e-12) invalid("distortion produced a negative weight; g must be non-decreasing");
      w = 0.0;
    }
  }
  out.sigma0 = grid_std(out.weights);
  out.satisfies_a1 = out.sigma0 > kSigma0Floor;
  out.is_concave = true;
  for (std::size_t i = 1; i < n; ++i) {
    if (out.weights[i] < out.weights[i - 1] - kConcavityTolerance) {
      out.is_concave = false;
      break;
    }
  }
  return out;
}

double distortion_value(const GammaGrid& gamma, std::span<const double> q) {
  if (gamma.size() != q.size()) {
    fail(ErrorCode::GridSizeMismatch, "weight and quantile grids differ in size");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) sum += gamma.weights[i] * q[i];
  return sum / static_cast<double>(q.size());
}

double rho(const GammaGrid& gamma, const DiscreteReference& f) {
  if (!gamma.satisfies_a1) fail(ErrorCode::AssumptionA1Violated, "sigma0 = 0: Assumption 2.1 fails");
  return corr(f.grid, gamma.weights);
}

double rho(const GammaGrid& gamma, const ReferenceDistribution& f, std::size_t n) {
  return rho(gamma, discretize(f, n));
}

}  // namespace drisk
