#include "nlslab/record.hpp"

#include "nlslab/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>

namespace nls {

void ExperimentRecord::set_times(std::vector<double> t) {
  for (size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw UsageError("record time grid must be strictly increasing");
  if (!series.empty() && t.size() != times.size()) throw UsageError("time grid size differs from existing series");
  times = std::move(t);
}

void ExperimentRecord::add_series(const std::string& name, std::vector<double> values) {
  if (values.size() != times.size()) throw UsageError("series '" + name + "' does not match the time grid");
  series[name] = std::move(values);
}

const SeriesFit& ExperimentRecord::fit(const std::string& name, const std::string& series_name, double t_lo,
                                       double t_hi) {
  const auto it = series.find(series_name);
  if (it == series.end()) throw UsageError("no series named '" + series_name + "'");
  SeriesFit f{series_name, t_lo, t_hi, fit_decay(times, it->second, t_lo, t_hi)};
  return fits[name] = f;
}

void ExperimentRecord::validate() const {
  for (size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw UsageError("record time grid must be strictly increasing");
  for (const auto& [name, s] : series)
    if (s.size() != times.size()) throw UsageError("series '" + name + "' does not match the time grid");
  for (const auto& [name, f] : fits)
    if (!series.count(f.series)) throw UsageError("fit '" + name + "' references a missing series");
}

std::string ExperimentRecord::to_json() const {
  validate();
  nlohmann::json j;
  j["config"] = config;
  j["times"] = times;
  j["series"] = series;
  j["scalars"] = scalars;
  nlohmann::json fj = nlohmann::json::object();
  for (const auto& [name, f] : fits)
    fj[name] = {{"series", f.series},     {"t_lo", f.t_lo},           {"t_hi", f.t_hi},
                {"slope", f.fit.slope},   {"intercept", f.fit.intercept}, {"r2", f.fit.r2},
                {"samples", f.fit.samples}};
  j["fits"] = fj;
  return j.dump(2);
}

void ExperimentRecord::write_json(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << to_json() << '\n';
}

void ExperimentRecord::write_csv(const std::string& path) const {
  validate();
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "t";
  for (const auto& [name, s] : series) os << ',' << name;
  os << '\n' << std::setprecision(17);
  for (size_t i = 0; i < times.size(); ++i) {
    os << times[i];
    for (const auto& [name, s] : series) os << ',' << s[i];
    os << '\n';
  }
}

}  // namespace nls
