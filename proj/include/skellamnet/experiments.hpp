#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace skellamnet {

// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitInfeasible = 3,
  kExitNumerical = 4,
};

struct RunOptions {
  std::optional<std::string> out_dir;  // overrides global.output_dir
  std::optional<std::uint64_t> seed;   // overrides global.seed
};

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::string> files;     // written outputs, in order
  std::vector<std::string> warnings;  // e.g. boundary maximizers, infeasible rows
};

nlohmann::json load_config(const std::string& path);

// "%.12g"; NaN and infinities become "NA".
std::string format_number(double v);

CommandResult cmd_figure1(const nlohmann::json& config, const RunOptions& opts);
CommandResult cmd_stein(const nlohmann::json& config, const RunOptions& opts);
CommandResult cmd_comb(const nlohmann::json& config, const RunOptions& opts);
CommandResult cmd_chains(const nlohmann::json& config, const RunOptions& opts);

// Dispatch by name; unknown names throw ConfigError.
CommandResult run_command(const std::string& name, const nlohmann::json& config, const RunOptions& opts);

// lambda for a named law at n_v: constant = log 100, log = log n_v,
// sqrt = sqrt n_v, linear = n_v.
double lambda_for_law(const std::string& law, double n_v);

}  // namespace skellamnet
