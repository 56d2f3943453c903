#pragma once

#include <string>
#include <vector>

namespace lab {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Scenario configs used by criteria 7-11 are read from `config_dir`.
std::vector<int> criterion_ids();
CriterionResult run_criterion(int id, const std::string& config_dir);
std::string format(const CriterionResult& r);

}  // namespace lab
