#pragma once

#include "nlslab/fit.hpp"

#include <map>
#include <string>
#include <vector>

namespace nls {

struct SeriesFit {
  std::string series;
  double t_lo = 0.0, t_hi = 0.0;
  DecayFit fit;
};

// Diagnostics of one scenario run: named series on a common time grid plus
// fitted decay slopes.
struct ExperimentRecord {
  std::map<std::string, std::string> config;
  std::vector<double> times;
  std::map<std::string, std::vector<double>> series;
  std::map<std::string, SeriesFit> fits;
  std::map<std::string, double> scalars;

  void set_times(std::vector<double> t);
  void add_series(const std::string& name, std::vector<double> values);
  const SeriesFit& fit(const std::string& name, const std::string& series_name, double t_lo, double t_hi);
  void validate() const;

  std::string to_json() const;
  void write_json(const std::string& path) const;
  void write_csv(const std::string& path) const;
};

}  // namespace nls
