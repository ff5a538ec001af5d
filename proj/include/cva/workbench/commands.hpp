#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cva/workbench/config.hpp"

namespace cva::wb {

enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2, kCheckFailed = 3 };

struct GlobalOptions {
  std::string config_path;  // empty: all defaults
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  int threads = 0;  // 0: OpenMP default
  std::string format = "csv";
  bool check = false;
};

const std::vector<std::string>& command_names();
/// Config sections a command reads; these (and only these) enter its config hash.
std::vector<std::string> command_sections(const std::string& command);

/// Loads and validates the config, then runs the command. Validation errors
/// propagate as ConfigError / std::invalid_argument before any computation;
/// numerical failures as NumericalError. Returns kOk, kNumerical (per-row
/// failures that did not abort the run) or kCheckFailed.
int run_command(const std::string& command, const Config& config, const GlobalOptions& opts);

/// Defaults of every section, formatted for `--help`.
std::string config_help();

}  // namespace cva::wb
