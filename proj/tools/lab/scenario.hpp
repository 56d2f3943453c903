#pragma once

#include "lab/config.hpp"

#include "nlslab/profile.hpp"
#include "nlslab/record.hpp"
#include "nlslab/scattering.hpp"

#include <string>
#include <vector>

namespace lab {

struct CheckOutcome {
  std::string name;
  double value, bound;
  bool pass;
};

struct ScenarioResult {
  nls::ExperimentRecord record;
  std::vector<nls::ComplexField> states;  // u at record.times
  nls::ExperimentRecord remainders;       // on the Duhamel nodes, when requested
  std::vector<CheckOutcome> checks;
  std::vector<std::string> warnings;

  bool checks_pass() const;
};

nls::ScatteringDatum make_datum(const ExperimentConfig& c);
// T1 resolved (auto_T1 when asked for) and c0 taken from the datum
nls::PotentialSpec resolved_potential(const ExperimentConfig& c);
// Phase family for the configured kind; `times` lists every time a Yafaev table must hold.
nls::PhaseFamily make_phase_family(const ExperimentConfig& c, const nls::PotentialSpec& spec,
                                   const std::vector<double>& times);
nls::FinalStateProblem make_problem(const ExperimentConfig& c, const nls::PotentialSpec& spec,
                                    const std::vector<double>& times);

// build phase -> profile -> backward final-state solve -> diagnostics -> fits -> checks
ScenarioResult run_scenario(const ExperimentConfig& c);

// record.json, series.csv, config.ini, checkpoints/u_<k>.bin under dir
void write_outputs(const ScenarioResult& r, const ExperimentConfig& c, const std::string& dir);

}  // namespace lab
