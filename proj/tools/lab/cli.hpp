#pragma once

#include <string>

namespace lab {

enum ExitCode : int {
  exit_ok = 0,
  exit_other = 1,
  exit_config = 2,
  exit_domain = 3,
  exit_contraction = 4,
  exit_check = 5,
};

// labcli entry point; `config_dir` is where `check` looks for the bundled scenarios.
int run_cli(int argc, char** argv, const std::string& config_dir);

}  // namespace lab
