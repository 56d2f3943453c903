#include "lab/cli.hpp"
#include "lab/config.hpp"
#include "lab/scenario.hpp"

#include "nlslab/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace lab;

namespace {

const char* kSmoke = R"([run]
name = smoke
[grid]
n = 1
N = 1024
L = 400
[datum]
shape = gaussian_ring
amplitude = 0.1
gamma = 2
xi0 = 1.5
sigma = 0.3
[equation]
nu = 1
[phase]
kind = free
[times]
t_end = 5
horizon = 40
T_start = 60
dt = 0.1
samples = 4
[diagnostics]
series = unmodified, mass
[checks]
mass_drift_max = 1e-8
)";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("labcli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_cfg(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "scenario.cfg";
  std::ofstream(p) << text;
  return p;
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "labcli");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data(), LAB_CONFIG_DIR);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

fs::path only_subdir(const fs::path& root) {
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory()) dirs.push_back(e.path());
  REQUIRE(dirs.size() == 1);
  return dirs.front();
}

}  // namespace

TEST_CASE("config parsing rejects unknown keys and sections") {
  CHECK_THROWS_AS(parse_config(std::string(kSmoke) + "[grid]\nspacing = 3\n"), nls::ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kSmoke) + "[solver]\norder = 2\n"), nls::ConfigError);
  CHECK_THROWS_AS(parse_config(kSmoke, {{"grid.N", "many"}}), nls::ConfigError);
  CHECK_THROWS_AS(parse_config(kSmoke, {{"phase.kind", "magic"}}), nls::ConfigError);
}

TEST_CASE("config overrides and snapshot") {
  const ExperimentConfig c = parse_config(kSmoke, {{"grid.N", "2048"}, {"run.seed", "7"}});
  CHECK(c.grid.points() == 2048);
  CHECK(c.seed == 7);
  CHECK(c.name == "smoke");
  CHECK(c.wants("mass"));
  CHECK_FALSE(c.wants("picard"));
  // the snapshot reparses to the same configuration
  const ExperimentConfig again = parse_config(c.snapshot);
  CHECK(again.grid.points() == 2048);
  CHECK(again.times.horizon == doctest::Approx(40.0));
  CHECK(again.checks.at("mass_drift_max") == doctest::Approx(1e-8));
}

TEST_CASE("schema lists every section") {
  const std::string s = config_schema();
  for (const char* section : {"[run]", "[grid]", "[potential]", "[datum]", "[equation]", "[phase]", "[times]",
                              "[diagnostics]", "[picard]", "[checks]"})
    CHECK(s.find(section) != std::string::npos);
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("exit");
  SUBCASE("unknown key is a config error") {
    const fs::path cfg = write_cfg(dir, std::string(kSmoke) + "[grid]\nspacing = 3\n");
    CHECK(cli({"run", "--config", cfg.string(), "--out", (dir / "out").string()}) == exit_config);
  }
  SUBCASE("bad flag is a usage error") { CHECK(cli({"run", "--bogus"}) == exit_config); }
  SUBCASE("sweep with no values") {
    const fs::path cfg = write_cfg(dir, kSmoke);
    CHECK(cli({"sweep", "--config", cfg.string(), "--axis", "datum.amplitude", "--values", "", "--out",
               (dir / "out").string()}) == exit_config);
  }
  SUBCASE("box too small for the dispersed profile") {
    const fs::path cfg = write_cfg(dir, kSmoke);
    CHECK(cli({"run", "--config", cfg.string(), "--set", "grid.L=60", "--out", (dir / "out").string()}) ==
          exit_domain);
  }
  SUBCASE("failed check") {
    const fs::path cfg = write_cfg(dir, kSmoke);
    CHECK(cli({"run", "--config", cfg.string(), "--check", "--set", "checks.mass_drift_max=1e-30", "--out",
               (dir / "out").string()}) == exit_check);
  }
}

TEST_CASE("run writes its outputs and is reproducible") {
  const fs::path dir = scratch("run");
  const fs::path cfg = write_cfg(dir, kSmoke);
  REQUIRE(cli({"run", "--config", cfg.string(), "--check", "--out", (dir / "a").string()}) == exit_ok);
  REQUIRE(cli({"run", "--config", cfg.string(), "--check", "--out", (dir / "b").string()}) == exit_ok);
  const fs::path a = only_subdir(dir / "a"), b = only_subdir(dir / "b");
  CHECK(a.filename().string().rfind("smoke-", 0) == 0);
  for (const char* f : {"config.ini", "record.json", "series.csv", "checks.txt"}) {
    CHECK(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(fs::exists(a / "checkpoints"));
}

TEST_CASE("scenario diagnostics") {
  const ExperimentConfig c = parse_config(kSmoke);
  const ScenarioResult r = run_scenario(c);
  CHECK(r.record.times.size() == 4);
  CHECK(r.states.size() == 4);
  CHECK(r.record.scalars.at("mass_drift") < 1e-8);
  CHECK(r.checks_pass());
}

TEST_CASE("sweep writes a summary row per value") {
  const fs::path dir = scratch("sweep");
  const fs::path cfg = write_cfg(dir, kSmoke);
  REQUIRE(cli({"sweep", "--config", cfg.string(), "--axis", "datum.amplitude", "--values", "0.05,0.1", "--jobs",
               "2", "--out", (dir / "out").string()}) == exit_ok);
  const std::string summary = slurp(only_subdir(dir / "out") / "summary.csv");
  std::istringstream is(summary);
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 3);
  CHECK(summary.rfind("datum.amplitude,exit", 0) == 0);
}

TEST_CASE("phase dump") {
  const fs::path dir = scratch("phase");
  const fs::path cfg = write_cfg(dir, kSmoke);
  REQUIRE(cli({"phase", "--config", cfg.string(), "--t", "10", "--out", dir.string()}) == exit_ok);
  fs::path sub;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory()) sub = e.path();
  CHECK(fs::exists(sub / "phase.csv"));
  CHECK(fs::exists(sub / "psi.bin"));
}
