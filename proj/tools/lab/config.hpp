#pragma once

#include "nlslab/phase.hpp"
#include "nlslab/potentials.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lab {

struct DatumConfig {
  std::string shape = "gaussian_ring";
  double c0 = 1.0;
  double amplitude = 0.1;
  double gamma = 2.0;
  double xi0 = 2.2;    // gaussian_ring centre
  double sigma = 0.35;
  double width = 1.0;  // switch width above c0
  double r_out = 3.0;  // bump_annulus outer radius
};

struct TimesConfig {
  double t_end = 20.0;    // earliest time of the backward solve
  double T_start = 800.0; // where u = u_p is imposed
  double horizon = 200.0; // last sample time
  double T_max = 200.0;   // Duhamel truncation for remainders and Picard
  double dt = 0.05;
  int samples = 12;
  double fit_lo = 0.0, fit_hi = 0.0;  // 0: the sampled window
};

struct PicardConfig {
  int iterations = 5;
  double b = 0.5;
};

struct ExperimentConfig {
  std::string name = "scenario";
  nls::GridSpec grid;
  nls::PotentialSpec potential;
  bool auto_T1 = false;
  DatumConfig datum;
  double nu = 1.0;
  nls::PhaseKind phase = nls::PhaseKind::free;
  TimesConfig times;
  std::vector<std::string> diagnostics;
  PicardConfig picard;
  std::uint64_t seed = 1;
  std::map<std::string, double> checks;
  // theorem-window violations found at load time
  std::vector<std::string> warnings;
  // normalized INI text of everything that was read, for the run snapshot
  std::string snapshot;

  bool wants(const std::string& diagnostic) const;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;  // "section.key" -> value

// Throws nls::ConfigError on syntax errors, unknown sections or keys, and bad values.
ExperimentConfig parse_config(const std::string& text, const Overrides& overrides = {});
ExperimentConfig load_config(const std::string& path, const Overrides& overrides = {});

// Human-readable schema, printed by `labcli run --help-config`.
std::string config_schema();

}  // namespace lab
