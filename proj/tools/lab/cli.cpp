#include "lab/cli.hpp"

#include "lab/acceptance.hpp"
#include "lab/config.hpp"
#include "lab/scenario.hpp"

#include "nlslab/errors.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace lab {

using namespace nls;
namespace fs = std::filesystem;

namespace {

std::string timestamped_dir(const std::string& root, const std::string& name) {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  localtime_r(&now, &tm);
  std::ostringstream os;
  os << name << '-' << std::put_time(&tm, "%Y%m%d-%H%M%S");
  fs::path dir = fs::path(root) / os.str();
  for (int k = 2; fs::exists(dir); ++k) dir = fs::path(root) / (os.str() + "-" + std::to_string(k));
  fs::create_directories(dir);
  return dir.string();
}

// exception -> exit code, with the message on stderr
int classify(const std::exception_ptr& ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return exit_config;
  } catch (const DomainEscape& e) {
    std::cerr << "domain escape: " << e.what() << '\n';
    return exit_domain;
  } catch (const GridMismatch& e) {
    std::cerr << "domain escape: " << e.what() << " (enlarge L)\n";
    return exit_domain;
  } catch (const ContractionFailure& e) {
    std::cerr << "contraction failure: " << e.what() << '\n';
    return exit_contraction;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_other;
  }
}

struct RunArgs {
  std::string config, out = "runs";
  bool check = false;
  double t_max = 0.0;
  long long seed = -1;
  std::vector<std::string> set;
};

Overrides overrides_of(const RunArgs& a) {
  Overrides o;
  for (const std::string& kv : a.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects section.key=value, got '" + kv + "'");
    o.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (a.t_max > 0.0) o.emplace_back("times.T_max", std::to_string(a.t_max));
  if (a.seed >= 0) o.emplace_back("run.seed", std::to_string(a.seed));
  return o;
}

void print_summary(const ScenarioResult& r, std::ostream& os) {
  for (const std::string& w : r.warnings) os << "warning: " << w << '\n';
  for (const auto& [name, f] : r.record.fits)
    os << name << ": slope " << f.fit.slope << " on [" << f.t_lo << ", " << f.t_hi << "], r2 " << f.fit.r2 << '\n';
  for (const auto& [name, v] : r.record.scalars) os << name << " = " << v << '\n';
  for (const CheckOutcome& c : r.checks)
    os << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.value << " (bound " << c.bound << ")\n";
}

int cmd_run(const RunArgs& a) {
  const ExperimentConfig c = load_config(a.config, overrides_of(a));
  const ScenarioResult r = run_scenario(c);
  const std::string dir = timestamped_dir(a.out, c.name);
  write_outputs(r, c, dir);
  print_summary(r, std::cout);
  std::cout << "output: " << dir << '\n';
  return a.check && !r.checks_pass() ? exit_check : exit_ok;
}

int cmd_sweep(const RunArgs& a, const std::string& axis, std::vector<std::string> values, int jobs) {
  std::erase(values, std::string());
  if (values.empty()) throw UsageError("sweep needs at least one value");
  if (jobs < 1) throw UsageError("--jobs must be positive");
  const Overrides base = overrides_of(a);
  // parse everything up front so a bad axis or value fails before any work
  std::vector<ExperimentConfig> configs;
  for (const std::string& v : values) {
    Overrides o = base;
    o.emplace_back(axis, v);
    configs.push_back(load_config(a.config, o));
  }
  const std::string dir = timestamped_dir(a.out, configs.front().name + "-sweep");
  struct Row {
    int code = exit_ok;
    ScenarioResult result;
  };
  std::vector<Row> rows(values.size());
  std::atomic<size_t> next{0};
  std::mutex log;
  auto worker = [&] {
    for (size_t k = next++; k < values.size(); k = next++) {
      try {
        rows[k].result = run_scenario(configs[k]);
        write_outputs(rows[k].result, configs[k], (fs::path(dir) / (axis + "=" + values[k])).string());
        if (a.check && !rows[k].result.checks_pass()) rows[k].code = exit_check;
      } catch (...) {
        std::lock_guard<std::mutex> lock(log);
        rows[k].code = classify(std::current_exception());
      }
      std::lock_guard<std::mutex> lock(log);
      std::cout << axis << " = " << values[k] << ": exit " << rows[k].code << '\n';
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < std::min<int>(jobs, values.size()); ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ofstream os(fs::path(dir) / "summary.csv");
  os << axis << ",exit,error_slope,error_up_at_horizon,unmodified_ratio_at_horizon\n" << std::setprecision(10);
  int code = exit_ok;
  for (size_t k = 0; k < values.size(); ++k) {
    const ExperimentRecord& rec = rows[k].result.record;
    auto scalar = [&](const char* name) {
      const auto it = rec.scalars.find(name);
      return it == rec.scalars.end() ? std::string("nan") : (std::ostringstream() << std::setprecision(10) << it->second).str();
    };
    const auto fit = rec.fits.find("error_slope");
    os << values[k] << ',' << rows[k].code << ','
       << (fit == rec.fits.end() ? std::string("nan") : std::to_string(fit->second.fit.slope)) << ','
       << scalar("error_up_at_horizon") << ',' << scalar("unmodified_ratio_at_horizon") << '\n';
    if (code == exit_ok) code = rows[k].code;
  }
  std::cout << "output: " << dir << '\n';
  return code;
}

int cmd_check(const std::vector<int>& only, const std::string& config_dir, const std::string& out) {
  const std::vector<int> ids = only.empty() ? criterion_ids() : only;
  std::ofstream file;
  if (!out.empty()) {
    fs::create_directories(out);
    file.open(fs::path(out) / "acceptance.txt");
  }
  bool all = true;
  for (int id : ids) {
    const CriterionResult r = run_criterion(id, config_dir);
    all = all && r.pass;
    std::cout << format(r) << std::endl;
    if (file) file << format(r) << '\n';
  }
  return all ? exit_ok : exit_check;
}

int cmd_phase(const RunArgs& a, double t) {
  const ExperimentConfig c = load_config(a.config, overrides_of(a));
  if (t <= 0.0) t = c.times.horizon;
  const PotentialSpec spec = resolved_potential(c);
  const PhaseField ph = make_phase_family(c, spec, {t})(t);
  const std::string dir = timestamped_dir(a.out, c.name + "-phase");
  {
    std::ofstream os(fs::path(dir) / "config.ini");
    os << c.snapshot;
  }
  // line through the centre along the first axis
  const GridSpec& g = ph.grid;
  const Eigen::Index N = g.points();
  Eigen::Index offset = 0, stride = 1;
  for (int d = g.n() - 1; d >= 1; --d) {
    offset += (N / 2) * stride;
    stride *= N;
  }
  const Eigen::ArrayXd x = g.axis(Space::position);
  std::ofstream os(fs::path(dir) / "phase.csv");
  os << "x,psi,grad_psi,laplacian_psi,theta,gauge_residual\n" << std::setprecision(15);
  for (Eigen::Index j = 0; j < N; ++j) {
    const Eigen::Index i = offset + j * stride;
    os << x[j] << ',' << ph.psi[i] << ',' << ph.grad_psi[0][i] << ',' << ph.laplacian_psi[i] << ','
       << ph.theta[0][i] << ',' << ph.gauge_residual[i] << '\n';
  }
  ComplexField psi(g, ph.psi.cast<Complex>(), Space::position, t);
  write_field((fs::path(dir) / "psi.bin").string(), psi);
  std::cout << "phase " << to_string(ph.kind) << " at t = " << t << ", T1 = " << spec.T1 << "\noutput: " << dir
            << '\n';
  return exit_ok;
}

}  // namespace

int run_cli(int argc, char** argv, const std::string& config_dir) {
  CLI::App app{"nlslab experiment runner"};
  app.require_subcommand(1);
  RunArgs a;
  std::string axis, configs = config_dir, check_out;
  std::vector<std::string> values;
  std::vector<int> only;
  int jobs = 1;
  double phase_t = 0.0;
  bool schema = false;

  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", a.config, "experiment config (INI)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", a.out, "root of the output directories");
    sub->add_option("--t-max", a.t_max, "override times.T_max");
    sub->add_option("--seed", a.seed, "override run.seed");
    sub->add_option("--set", a.set, "override section.key=value (repeatable)");
  };
  CLI::App* run = app.add_subcommand("run", "run one scenario");
  common(run, false);
  run->add_flag("--check", a.check, "exit 5 when a [checks] bound fails");
  run->add_flag("--help-config", schema, "print the config schema");

  CLI::App* sweep = app.add_subcommand("sweep", "run one scenario per value of a config key");
  common(sweep, true);
  sweep->add_flag("--check", a.check, "exit 5 when a [checks] bound fails");
  sweep->add_option("--axis", axis, "section.key to vary")->required();
  sweep->add_option("--values", values, "comma-separated values")->delimiter(',')->required();
  sweep->add_option("--jobs", jobs, "parallel runs");

  CLI::App* check = app.add_subcommand("check", "run the acceptance suite");
  check->add_option("--only", only, "criterion ids")->delimiter(',');
  check->add_option("--configs", configs, "directory of the bundled scenario configs");
  check->add_option("--out", check_out, "also write acceptance.txt here");

  CLI::App* phase = app.add_subcommand("phase", "build and dump the phase field");
  common(phase, true);
  phase->add_option("--t", phase_t, "time (default: times.horizon)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }
  try {
    if (run->parsed()) {
      if (schema) {
        std::cout << config_schema();
        return exit_ok;
      }
      if (a.config.empty()) throw UsageError("run needs --config");
      return cmd_run(a);
    }
    if (sweep->parsed()) return cmd_sweep(a, axis, values, jobs);
    if (check->parsed()) return cmd_check(only, configs, check_out);
    if (phase->parsed()) return cmd_phase(a, phase_t);
  } catch (...) {
    return classify(std::current_exception());
  }
  return exit_other;
}

}  // namespace lab
