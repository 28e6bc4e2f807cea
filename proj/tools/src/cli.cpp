#include "drisk/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "drisk/distortion.hpp"
#include "drisk/grid.hpp"
#include "drisk/oracle.hpp"
#include "drisk/samples_csv.hpp"
#include "drisk/solver.hpp"

namespace drisk::cli {

namespace {

using Json = nlohmann::ordered_json;

double parse_number(std::string_view text, std::string_view what) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    fail(ErrorCode::ParseError, "bad number '" + std::string(text) + "' in " + std::string(what));
  }
  return value;
}

std::pair<double, double> parse_pair(std::string_view body, std::string_view what) {
  const auto comma = body.find(',');
  if (comma == std::string_view::npos) fail(ErrorCode::ParseError, std::string(what) + " expects two numbers a,b");
  return {parse_number(body.substr(0, comma), what), parse_number(body.substr(comma + 1), what)};
}

Json optional_number(std::optional<double> x) { return x ? Json(*x) : Json(nullptr); }

std::string csv_optional(std::optional<double> x) { return x ? format_number(*x) : std::string(); }

// Writes to --out when given, else to the provided stream.
template <class Fn>
void emit(const RunConfig& cfg, std::ostream& fallback, Fn&& write) {
  if (cfg.out.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) fail(ErrorCode::InvalidArgument, "cannot open output file " + cfg.out);
  write(file);
}

Problem make_problem(const RunConfig& cfg, std::size_t default_n) {
  ReferenceDistribution reference = parse_reference(cfg.reference);
  DistortionSpec distortion = parse_distortion(cfg.distortion);
  std::size_t n = cfg.grid_n.value_or(default_n);
  if (!cfg.grid_n) {
    if (const auto* table = std::get_if<GammaTableDistortion>(&distortion.kind())) n = table->weights.size();
  }
  const MomentTarget target(cfg.mu.value_or(reference.mean()), cfg.sigma.value_or(reference.stddev()));
  ProblemSpec spec{std::move(reference), std::move(distortion), target, PenaltySpec(cfg.delta),
                   cfg.eps,          n,
                   SolverOptions{cfg.allow_var, cfg.force_general}};
  return Problem(spec);
}

Json solution_json(const Solution& s) {
  const auto& d = s.diagnostics;
  Json j;
  j["regime"] = std::string(to_string(s.regime));
  j["value"] = s.value;
  j["risk_part"] = s.risk_part;
  j["achieved_distance_sq"] = s.achieved_distance_sq;
  j["eps_min"] = d.eps_min;
  j["eps_max"] = d.eps_max;
  j["rho"] = d.rho;
  j["delta_star"] = optional_number(d.delta_star);
  j["eps_star"] = optional_number(d.eps_star);
  j["used_isotonic"] = d.used_isotonic;
  j["sigma0"] = d.sigma0;
  j["concave"] = d.concave;
  j["warnings"] = d.warnings;
  return j;
}

void write_quantile_csv(std::ostream& os, const Problem& p, const Solution& s) {
  os << "u,optimal,reference\n";
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    os << format_number(midpoint(i, n)) << ',' << format_number(s.optimal_quantile[i]) << ','
       << format_number(p.reference().grid[i]) << '\n';
  }
}

int report(const Error& e, std::ostream& err) {
  err << "error: " << e.what() << '\n';
  return exit_code_for(e.code());
}

}  // namespace

ReferenceDistribution parse_reference(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    fail(ErrorCode::ParseError, "reference must be normal:mu,sigma, uniform:lo,hi or empirical:path");
  }
  const std::string_view head = text.substr(0, colon);
  const std::string_view body = text.substr(colon + 1);
  if (head == "normal") {
    const auto [m, s] = parse_pair(body, "normal reference");
    if (!(s > 0.0)) fail(ErrorCode::ParseError, "normal reference needs sigma > 0");
    return ReferenceDistribution::normal(m, s);
  }
  if (head == "uniform") {
    const auto [lo, hi] = parse_pair(body, "uniform reference");
    if (!(hi > lo)) fail(ErrorCode::ParseError, "uniform reference needs lo < hi");
    return ReferenceDistribution::uniform(lo, hi);
  }
  if (head == "empirical") {
    try {
      return ReferenceDistribution::empirical(read_samples_csv(std::filesystem::path(std::string(body))));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError) throw;
      fail(ErrorCode::ParseError, std::string(body) + ": " + e.what());
    }
  }
  fail(ErrorCode::ParseError, "unknown reference kind '" + std::string(head) + "'");
}

std::vector<std::string> read_config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open config file " + path);
  std::vector<std::string> tokens;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      fail(ErrorCode::ParseError, path + ": line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    if (key == "config") fail(ErrorCode::ParseError, path + ": nested config files are not supported");
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InfeasibleRadius:
    case ErrorCode::RadiusOutOfRange:
      return kInfeasible;
    case ErrorCode::InvalidArgument:
    case ErrorCode::ParseError:
    case ErrorCode::DegenerateGrid:
    case ErrorCode::GridSizeMismatch:
    case ErrorCode::MomentMismatch:
    case ErrorCode::InvalidDistortion:
      return kParse;
    case ErrorCode::VaRRefused:
    case ErrorCode::AssumptionA1Violated:
    case ErrorCode::NotConcave:
    case ErrorCode::RhoDegenerate:
    case ErrorCode::AssumptionA4Violated:
    case ErrorCode::DegenerateProjection:
      return kAssumption;
    case ErrorCode::SamplingExhausted:
    case ErrorCode::VerificationFailed:
      return kVerification;
    case ErrorCode::InternalError:
      return kInternal;
  }
  return kInternal;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Problem p = make_problem(cfg, kDefaultGridSize);
  const Solution s = solve(p);
  for (const auto& w : s.diagnostics.warnings) err << "warning: " << w << '\n';
  if (cfg.format == "csv") {
    emit(cfg, out, [&](std::ostream& os) { write_quantile_csv(os, p, s); });
  } else {
    emit(cfg, out, [&](std::ostream& os) { os << solution_json(s).dump(2) << '\n'; });
  }
  if (!cfg.quantile_out.empty()) {
    std::ofstream file(cfg.quantile_out, std::ios::binary);
    if (!file) fail(ErrorCode::InvalidArgument, "cannot open output file " + cfg.quantile_out);
    write_quantile_csv(file, p, s);
  }
  return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.axis != "delta" && cfg.axis != "eps") fail(ErrorCode::ParseError, "axis must be delta or eps");
  if (!(cfg.from < cfg.to) || cfg.steps < 2) fail(ErrorCode::InvalidArgument, "sweep needs from < to and steps >= 2");
  const bool delta_axis = cfg.axis == "delta";
  RunConfig base_cfg = cfg;
  if (delta_axis) base_cfg.delta = std::max(cfg.from, 0.0);
  else base_cfg.eps.reset();
  const Problem base = make_problem(base_cfg, kDefaultGridSize);

  struct Row {
    double axis_value;
    std::string regime;
    std::optional<double> value, distance, threshold;
  };
  std::vector<Row> rows;
  for (std::size_t k = 0; k < cfg.steps; ++k) {
    const double x = k + 1 == cfg.steps ? cfg.to : cfg.from + (cfg.to - cfg.from) * k / (cfg.steps - 1);
    Row row{x, "Infeasible", {}, {}, {}};
    try {
      const Problem p = delta_axis ? base.with_delta(x).with_radius(cfg.eps) : base.with_radius(x);
      const Solution s = solve(p);
      row.regime = std::string(to_string(s.regime));
      row.value = s.value;
      row.distance = s.achieved_distance_sq;
      if (delta_axis && cfg.eps) {
        const auto [emin, emax] = epsilon_bounds(p);
        if (*cfg.eps > emin && *cfg.eps < emax && p.rho_effective() < 1.0 - 1e-9) row.threshold = delta_star(p, *cfg.eps);
      } else {
        row.threshold = epsilon_star(p, p.delta());
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleRadius) throw;
    }
    rows.push_back(std::move(row));
  }

  if (cfg.format == "json") {
    Json arr = Json::array();
    for (const auto& r : rows) {
      arr.push_back(Json{{"axis_value", r.axis_value},
                         {"regime", r.regime},
                         {"value", optional_number(r.value)},
                         {"achieved_distance_sq", optional_number(r.distance)},
                         {"delta_star_or_eps_star", optional_number(r.threshold)}});
    }
    emit(cfg, out, [&](std::ostream& os) { os << arr.dump(2) << '\n'; });
  } else {
    emit(cfg, out, [&](std::ostream& os) {
      os << "axis_value,regime,value,achieved_distance_sq,delta_star_or_eps_star\n";
      for (const auto& r : rows) {
        os << format_number(r.axis_value) << ',' << r.regime << ',' << csv_optional(r.value) << ','
           << csv_optional(r.distance) << ',' << csv_optional(r.threshold) << '\n';
      }
    });
  }
  (void)err;
  return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Problem p = make_problem(cfg, 200);
  OracleConfig oc;
  oc.samples = cfg.samples;
  oc.ascent_iters = cfg.ascent_iters;
  oc.ascent_runs = cfg.ascent_runs;
  oc.step = cfg.step;
  oc.seed = cfg.seed;
  oc.gap_tolerance = cfg.gap_tolerance;
  oc.corrupt_offset = cfg.self_test ? 0.1 : 0.0;

  const auto to_json = [](const OracleReport& r) {
    Json j;
    j["passed"] = r.passed;
    j["regime"] = std::string(to_string(r.regime));
    j["best_value"] = r.best_value;
    j["closed_form_value"] = r.closed_form_value;
    j["gap"] = r.gap;
    j["violations"] = r.violations;
    j["samples"] = r.samples;
    return j;
  };
  try {
    const OracleReport r = verify(p, oc);
    emit(cfg, out, [&](std::ostream& os) { os << to_json(r).dump(2) << '\n'; });
    return kOk;
  } catch (const VerificationError& e) {
    Json j = to_json(e.report());
    j["best_grid"] = std::vector<double>(e.report().best_grid.begin(), e.report().best_grid.end());
    emit(cfg, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    err << "error: " << e.what() << '\n';
    return kVerification;
  }
}

int cmd_info(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Problem p = make_problem(cfg, kDefaultGridSize);
  Json j;
  j["reference"] = p.spec().reference.describe();
  j["distortion"] = p.spec().distortion.describe();
  j["grid_n"] = p.size();
  j["mu"] = p.mu();
  j["sigma"] = p.sigma();
  j["eps_min"] = p.eps_min();
  j["sigma0"] = p.gamma().sigma0;
  j["concave"] = p.gamma().is_concave;
  j["assumption_a1"] = p.gamma().satisfies_a1;
  if (p.gamma().satisfies_a1) {
    j["rho"] = p.rho();
    j["eps_max"] = epsilon_bounds(p).second;
    if (!p.gamma().is_concave) {
      j["rho_hat"] = p.rho_effective();
      const A4Report& a4 = p.default_a4_report();
      j["assumption_a4"] = Json{{"holds_a", a4.holds_a}, {"holds_b", a4.holds_b}, {"passed", a4.passed()}};
    }
  } else {
    j["rho"] = nullptr;
    j["eps_max"] = nullptr;
    err << "warning: sigma0 = 0: Assumption 2.1 fails\n";
  }
  emit(cfg, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Robust distortion risk under moment and Wasserstein constraints", "drisk"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::string config_path;
  app.add_option("--config", config_path, "Flat key=value file mirroring the flags; flags override it");
  app.add_option("--reference", cfg.reference, "normal:mu,sigma | uniform:lo,hi | empirical:path");
  app.add_option("--distortion", cfg.distortion,
                 "cvar:a | var:a | dualpower:b | piecewise:x,y;... | gammafile:path | smoothstep");
  app.add_option("--mu", cfg.mu, "Target mean (default: mean of the reference)");
  app.add_option("--sigma", cfg.sigma, "Target standard deviation (default: that of the reference)");
  app.add_option("--delta", cfg.delta, "Penalty on the squared distance");
  app.add_option("--eps", cfg.eps, "Squared radius of the Wasserstein ball");
  app.add_option("--grid-n", cfg.grid_n, "Number of grid cells (default 10000; 200 for verify)");
  app.add_option("--axis", cfg.axis, "Sweep axis: delta or eps");
  app.add_option("--from", cfg.from, "Sweep start");
  app.add_option("--to", cfg.to, "Sweep end");
  app.add_option("--steps", cfg.steps, "Sweep points");
  app.add_option("--seed", cfg.seed, "Oracle random seed");
  app.add_option("--out", cfg.out, "Output file (default stdout)");
  app.add_option("--format", cfg.format, "json or csv (default: csv for sweep, json otherwise)")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--quantile-out", cfg.quantile_out, "solve: also write the optimal quantile as CSV");
  app.add_flag("--allow-var", cfg.allow_var, "Accept VaR despite its grid-dependent results");
  app.add_flag("--force-general", cfg.force_general, "Use the isotonic route even for concave weights");
  app.add_option("--samples", cfg.samples, "verify: number of random feasible samples");
  app.add_option("--ascent-iters", cfg.ascent_iters, "verify: iteration cap per ascent run");
  app.add_option("--ascent-runs", cfg.ascent_runs, "verify: ascent runs from the best samples");
  app.add_option("--step", cfg.step, "verify: initial ascent step");
  app.add_option("--gap-tol", cfg.gap_tolerance, "verify: allowed shortfall of the ascent");
  app.add_flag("--self-test", cfg.self_test, "verify: offset the solver value to check the harness fails");

  app.add_subcommand("solve", "Solve one problem and print the result as JSON (or the quantile as CSV)");
  app.add_subcommand("sweep", "Solve along a delta or eps axis and print CSV rows");
  app.add_subcommand("verify", "Check the solver against random sampling and projected ascent");
  app.add_subcommand("info", "Print the problem's scalars without solving");

  try {
    // Config tokens go first so later command-line flags take precedence.
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
      const std::string_view a = argv[i];
      if (a == "--config" && i + 1 < argc) {
        const auto tokens = read_config_tokens(argv[i + 1]);
        args.insert(args.begin(), tokens.begin(), tokens.end());
      } else if (a.starts_with("--config=")) {
        const auto tokens = read_config_tokens(std::string(a.substr(9)));
        args.insert(args.begin(), tokens.begin(), tokens.end());
      }
    }
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    std::reverse(args.begin(), args.end());  // CLI11 consumes the vector from the back
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return kParse;
  } catch (const Error& e) {
    return report(e, err);
  }

  cfg.command = app.get_subcommands().front()->get_name();
  try {
    if (cfg.command == "solve") return cmd_solve(cfg, out, err);
    if (cfg.command == "sweep") return cmd_sweep(cfg, out, err);
    if (cfg.command == "verify") return cmd_verify(cfg, out, err);
    return cmd_info(cfg, out, err);
  } catch (const Error& e) {
    return report(e, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace drisk::cli
