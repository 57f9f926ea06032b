#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "spdemove/experiments.hpp"

namespace spdemove::cli {

enum class Command { simulate, trajectories, estimate, mc_study, sweep, fisher };

std::string to_string(Command c);

/// Environment variable naming the directory used when --out is not given.
inline constexpr const char* kOutputDirEnv = "SPDEMOVE_OUTPUT_DIR";

/// Fully resolved configuration of one CLI run.
struct CliConfig {
  Command command = Command::simulate;
  StudyConfig study;
  std::vector<double> xi;      // trajectories: evaluation points
  std::optional<SweepAxis> axis;
  std::vector<double> values;  // sweep values
  std::optional<std::string> input;
  std::string out;
  nlohmann::json resolved;  // the echo written into every summary
};

/// Merges `file` (a config document, or a previous summary carrying a
/// "config" object) with `flags`; flags win. Applies defaults, then validates
/// and reports every missing required field at once.
CliConfig resolve_config(Command command, const nlohmann::json& file,
                         const nlohmann::json& flags);

/// Reads a JSON config file and resolves it for `command`.
CliConfig load_config(const std::filesystem::path& path, Command command,
                      const nlohmann::json& flags = nlohmann::json::object());

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

/// Entry point: parses argv, runs the subcommand, writes outputs atomically.
/// Returns 0 on success, 1 on validation errors, 2 on numerical errors.
int dispatch(int argc, const char* const* argv, std::ostream& err);

/// Runs an already-resolved configuration.
int run(const CliConfig& config, std::ostream& err);

}  // namespace spdemove::cli
