#include "lab/config.hpp"

#include "nlslab/errors.hpp"
#include "nlslab/scattering.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lab {

namespace pt = boost::property_tree;
using nls::ConfigError;

namespace {

struct Key {
  const char* section;
  const char* key;
  const char* help;
};

const Key kSchema[] = {
    {"run", "name", "label used in the output directory name"},
    {"run", "seed", "seed for randomized probe sets (auto T1)"},
    {"grid", "n", "space dimension, 1..3"},
    {"grid", "N", "points per axis"},
    {"grid", "L", "half length of the periodic box [-L, L)^n"},
    {"potential", "short_amplitude", "Z_S in Z_S <x>^-rho_S"},
    {"potential", "short_rho", "rho_S"},
    {"potential", "long_amplitude", "Z_L of the long-range part"},
    {"potential", "long_rho", "rho_L"},
    {"potential", "long_form", "bracket (<x>^-rho) or power (regularized |x|^-rho)"},
    {"potential", "regularization", "delta of the regularized power form"},
    {"potential", "T1", "cutoff time shift, a number or auto"},
    {"datum", "shape", "gaussian_ring or bump_annulus"},
    {"datum", "c0", "frequency floor: the datum vanishes on |xi| <= c0"},
    {"datum", "amplitude", "sup |u_plus_hat|"},
    {"datum", "gamma", "weight order of the datum"},
    {"datum", "xi0", "ring radius (gaussian_ring)"},
    {"datum", "sigma", "ring width (gaussian_ring)"},
    {"datum", "width", "switch width above c0 (gaussian_ring)"},
    {"datum", "r_out", "outer radius (bump_annulus; inner radius is c0)"},
    {"equation", "nu", "coupling of nu |u|^{2/n} u"},
    {"phase", "kind", "yafaev, dollard or free"},
    {"times", "t_end", "earliest sample time"},
    {"times", "T_start", "time where u = u_p is imposed for the backward solve"},
    {"times", "horizon", "latest sample time"},
    {"times", "T_max", "truncation of the Duhamel integrals"},
    {"times", "dt", "time step"},
    {"times", "samples", "number of log-spaced sample times in [t_end, horizon]"},
    {"times", "fit_lo", "lower end of the decay-fit window (default t_end)"},
    {"times", "fit_hi", "upper end of the decay-fit window (default horizon)"},
    {"diagnostics", "series", "comma list of unmodified, mass, remainders, picard (|u - u_p| is always recorded)"},
    {"picard", "iterations", "Picard iterations"},
    {"picard", "b", "time weight of the X_T norm"},
    {"checks", "error_slope_max", "fitted slope of |u - u_p| must not exceed this"},
    {"checks", "unmodified_ratio_min", "|u - u_p without Ozawa phase| / |u - u_p| at the horizon"},
    {"checks", "mass_drift_max", "largest |(|u(t)| - |u(T_start)|)|"},
    {"checks", "U1W_slope_max", "fitted slope of |U1 W|"},
    {"checks", "E1_slope_max", "fitted slope of |E1|"},
    {"checks", "CW_slope_max", "fitted slope of |C W|"},
    {"checks", "contraction_ratio_max", "largest Picard ratio d_{k+1}/d_k"},
};

const Key* find_key(const std::string& section, const std::string& key) {
  for (const Key& k : kSchema)
    if (section == k.section && key == k.key) return &k;
  return nullptr;
}

bool known_section(const std::string& s) {
  return std::any_of(std::begin(kSchema), std::end(kSchema), [&](const Key& k) { return s == k.section; });
}

template <class T>
T get(const pt::ptree& tree, const std::string& path, T fallback) {
  const auto node = tree.get_optional<std::string>(path);
  if (!node) return fallback;
  std::istringstream is(*node);
  T v;
  is >> v;
  if (is.fail() || !(is >> std::ws).eof()) throw ConfigError(path + ": cannot read '" + *node + "'");
  return v;
}

std::string get_string(const pt::ptree& tree, const std::string& path, const std::string& fallback) {
  return tree.get<std::string>(path, fallback);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(" \t"), b = item.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

void check_keys(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    require(!body.empty() || body.data().empty(), "key '" + section + "' outside any section");
    require(known_section(section), "unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      require(value.empty(), "nested key " + section + "." + key);
      require(find_key(section, key) != nullptr, "unknown key " + section + "." + key);
    }
  }
}

void interpret(const pt::ptree& t, ExperimentConfig& c) {
  c.name = get_string(t, "run.name", c.name);
  c.seed = get<std::uint64_t>(t, "run.seed", c.seed);

  const int n = get<int>(t, "grid.n", 1);
  const int N = get<int>(t, "grid.N", 1024);
  const double L = get<double>(t, "grid.L", 100.0);
  require(n >= 1 && n <= 3, "grid.n must be 1, 2 or 3");
  require(N >= 8 && N % 2 == 0, "grid.N must be even and at least 8");
  require(L > 0.0, "grid.L must be positive");
  c.grid = nls::GridSpec(n, N, L);

  nls::PotentialSpec& p = c.potential;
  p.n = n;
  const double zs = get<double>(t, "potential.short_amplitude", 0.0);
  if (zs != 0.0) p.short_range = nls::ShortRange{zs, get<double>(t, "potential.short_rho", 2.0)};
  const double zl = get<double>(t, "potential.long_amplitude", 0.0);
  if (zl != 0.0) {
    const std::string form = get_string(t, "potential.long_form", "bracket");
    require(form == "bracket" || form == "power", "potential.long_form must be bracket or power");
    p.long_range = nls::LongRange{zl, get<double>(t, "potential.long_rho", 1.0),
                                  form == "bracket" ? nls::LongRangeForm::inverse_bracket
                                                    : nls::LongRangeForm::inverse_power};
  }
  p.regularization = get<double>(t, "potential.regularization", 0.0);
  const std::string T1 = get_string(t, "potential.T1", "auto");
  c.auto_T1 = T1 == "auto";
  if (!c.auto_T1) p.T1 = get<double>(t, "potential.T1", 1.0);
  try {
    nls::validate(p);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("potential: ") + e.what());
  }

  DatumConfig& d = c.datum;
  d.shape = get_string(t, "datum.shape", d.shape);
  require(d.shape == "gaussian_ring" || d.shape == "bump_annulus", "datum.shape must be gaussian_ring or bump_annulus");
  d.c0 = get<double>(t, "datum.c0", d.c0);
  d.amplitude = get<double>(t, "datum.amplitude", d.amplitude);
  d.gamma = get<double>(t, "datum.gamma", d.gamma);
  d.xi0 = get<double>(t, "datum.xi0", d.xi0);
  d.sigma = get<double>(t, "datum.sigma", d.sigma);
  d.width = get<double>(t, "datum.width", d.width);
  d.r_out = get<double>(t, "datum.r_out", d.r_out);
  require(d.c0 > 0.0, "datum.c0 must be positive");
  require(d.shape != "bump_annulus" || d.r_out > d.c0, "datum.r_out must exceed datum.c0");
  p.c0 = d.c0;

  c.nu = get<double>(t, "equation.nu", c.nu);

  const std::string kind = get_string(t, "phase.kind", "free");
  if (kind == "free")
    c.phase = nls::PhaseKind::free;
  else if (kind == "yafaev")
    c.phase = nls::PhaseKind::yafaev;
  else if (kind == "dollard")
    c.phase = nls::PhaseKind::dollard;
  else
    throw ConfigError("phase.kind must be yafaev, dollard or free");

  TimesConfig& tm = c.times;
  tm.t_end = get<double>(t, "times.t_end", tm.t_end);
  tm.horizon = get<double>(t, "times.horizon", tm.horizon);
  tm.T_start = get<double>(t, "times.T_start", std::max(tm.T_start, tm.horizon));
  tm.T_max = get<double>(t, "times.T_max", tm.horizon);
  tm.dt = get<double>(t, "times.dt", tm.dt);
  tm.samples = get<int>(t, "times.samples", tm.samples);
  tm.fit_lo = get<double>(t, "times.fit_lo", tm.t_end);
  tm.fit_hi = get<double>(t, "times.fit_hi", tm.horizon);
  require(tm.t_end > 0.0 && tm.t_end < tm.horizon, "need 0 < times.t_end < times.horizon");
  require(tm.T_start >= tm.horizon, "times.T_start must be at least times.horizon");
  require(tm.T_max > tm.t_end, "times.T_max must exceed times.t_end");
  require(tm.dt > 0.0, "times.dt must be positive");
  require(tm.samples >= 2, "times.samples must be at least 2");
  require(tm.fit_lo < tm.fit_hi, "times.fit_lo must be below times.fit_hi");

  c.diagnostics = split_list(get_string(t, "diagnostics.series", "unmodified, mass"));
  for (const std::string& s : c.diagnostics)
    require(s == "unmodified" || s == "mass" || s == "remainders" || s == "picard",
            "unknown diagnostic '" + s + "'");

  c.picard.iterations = get<int>(t, "picard.iterations", c.picard.iterations);
  c.picard.b = get<double>(t, "picard.b", c.picard.b);
  require(c.picard.iterations >= 1, "picard.iterations must be positive");

  if (const auto checks = t.get_child_optional("checks"))
    for (const auto& [key, value] : *checks) c.checks[key] = get<double>(t, "checks." + key, 0.0);
}

void collect_warnings(ExperimentConfig& c) {
  c.warnings = nls::hypothesis_warnings(c.potential);
  const int n = c.grid.n();
  const double g = c.datum.gamma;
  const bool in_window = n == 1 ? (g >= 1.0 && g <= 2.0) : (g > 0.5 * n && g < 1.0 + 2.0 / n);
  if (!in_window) c.warnings.push_back("outside theorem hypotheses: gamma = " + std::to_string(g));
  const auto [lo, hi] = nls::b_window(n, g, c.potential);
  if (!(lo < hi)) c.warnings.push_back("outside theorem hypotheses: empty b window");
  else if (c.wants("picard") && !(c.picard.b > lo && c.picard.b < hi))
    c.warnings.push_back("outside theorem hypotheses: picard.b outside (" + std::to_string(lo) + ", " +
                         std::to_string(hi) + ")");
  if (c.phase == nls::PhaseKind::dollard && c.potential.has_long_range() &&
      !(c.potential.rho_L() > 0.5 + n / 8.0))
    c.warnings.push_back("outside theorem hypotheses: Dollard phase needs rho_L > 1/2 + n/8");
}

}  // namespace

bool ExperimentConfig::wants(const std::string& diagnostic) const {
  return std::find(diagnostics.begin(), diagnostics.end(), diagnostic) != diagnostics.end();
}

ExperimentConfig parse_config(const std::string& text, const Overrides& overrides) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  check_keys(tree);
  for (const auto& [path, value] : overrides) {
    const auto dot = path.find('.');
    require(dot != std::string::npos && find_key(path.substr(0, dot), path.substr(dot + 1)),
            "unknown key " + path);
    tree.put(path, value);
  }
  ExperimentConfig c;
  interpret(tree, c);
  collect_warnings(c);
  std::ostringstream os;
  pt::write_ini(os, tree);
  c.snapshot = os.str();
  return c;
}

ExperimentConfig load_config(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string config_schema() {
  std::ostringstream os;
  std::string section;
  for (const Key& k : kSchema) {
    if (section != k.section) {
      section = k.section;
      os << "[" << section << "]\n";
    }
    os << "  " << k.key << ": " << k.help << "\n";
  }
  return os.str();
}

}  // namespace lab
