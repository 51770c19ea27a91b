#pragma once

#include <string>

#include "homog/io.hpp"

namespace homog::cli {

struct CliOptions {
  std::string out_dir = "out";
  bool dry_run = false;
  int threads = 1;
};

// Dispatches one subcommand (cell | solve | rates | defect | meanvalue) on a
// parsed JSON config. Catches domain errors, emits a one-line JSON diagnostic
// on stderr and returns the process exit code:
// 0 ok, 1 config error, 2 hypothesis violation, 3 solver failure,
// 4 insufficient data.
int run_command(const std::string& command, const io::json& config,
                const CliOptions& opts);

// Reads the config file, then dispatches.
int run_command_file(const std::string& command, const std::string& config_path,
                     const CliOptions& opts);

}  // namespace homog::cli
