#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drisk/errors.hpp"
#include "drisk/reference.hpp"

namespace drisk::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kInfeasible = 2,
  kParse = 3,
  kAssumption = 4,
  kVerification = 5,
};

struct RunConfig {
  std::string command;
  std::string reference = "normal:0,1";
  std::string distortion = "cvar:0.7";
  std::optional<double> mu;
  std::optional<double> sigma;
  double delta = 0.0;
  std::optional<double> eps;
  std::optional<std::size_t> grid_n;
  std::string axis = "delta";
  double from = 0.0;
  double to = 1.0;
  std::size_t steps = 11;
  std::uint64_t seed = 20240901;
  std::string out;           // empty: stdout
  std::string format;        // json or csv; empty: csv for sweep, json otherwise
  std::string quantile_out;  // solve: optional CSV of the optimal quantile
  bool allow_var = false;
  bool force_general = false;
  // verify
  std::size_t samples = 10'000;
  std::size_t ascent_iters = 500;
  std::size_t ascent_runs = 10;
  double step = 0.1;
  double gap_tolerance = 1e-2;
  bool self_test = false;
};

/// `normal:mu,sigma`, `uniform:lo,hi` or `empirical:path` (CSV of losses).
ReferenceDistribution parse_reference(std::string_view text);

/// Flat `key=value` lines; `#` starts a comment. Keys are long flag names
/// without dashes. Returns `--key=value` tokens.
std::vector<std::string> read_config_tokens(const std::string& path);

int exit_code_for(ErrorCode code) noexcept;

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_info(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace drisk::cli
