#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pilotwave/csv.hpp"
#include "pilotwave/errors.hpp"
#include "pilotwave/runner/config.hpp"
#include "pilotwave/runner/scenarios.hpp"
#include "pilotwave/verification/acceptance.hpp"

namespace {

using namespace pilotwave;

int print_manifest_summary(const runner::RunManifest& m, const std::filesystem::path& dir) {
  for (const auto& c : m.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.label << "  residual=" << format_number(c.residual)
              << " " << relation_symbol(c.relation) << " " << format_number(c.tolerance) << '\n';
  }
  std::cout << m.scenario << ": " << (m.passed() ? "all checks passed" : "checks failed") << " -> " << dir.string() << '\n';
  return m.passed() ? 0 : 1;
}

int run(const std::string& config_path) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) throw IOFailure("cannot read " + config_path);
  std::stringstream text;
  text << in.rdbuf();
  const auto config = runner::parse_config(text.str());
  const auto dir = runner::resolve_output_dir(config);
  return print_manifest_summary(runner::run_scenario(config, dir), dir);
}

int check(const std::string& dir) {
  acceptance::SuiteOptions options;
  options.output_dir = dir;
  const auto results = acceptance::run_suite(options, std::cout);
  const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed(); });
  std::cout << (ok ? "acceptance: all criteria passed" : "acceptance: some criteria failed") << '\n';
  return ok ? 0 : 1;
}

int list_scenarios() {
  for (auto s : runner::all_scenarios()) {
    std::cout << runner::scenario_name(s) << "\t" << runner::scenario_summary(s) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bohmian trajectories and weak values on a periodic 1D grid"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "run one scenario from a JSON config");
  run_cmd->add_option("config", config_path, "config document")->required();

  std::string check_dir = "output/check";
  auto* check_cmd = app.add_subcommand("check", "run the acceptance suite");
  check_cmd->add_option("--output-dir", check_dir, "where criterion outputs go");

  app.add_subcommand("list-scenarios", "print the shipped scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(config_path);
    if (*check_cmd) return check(check_dir);
    return list_scenarios();
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
  } catch (const ValidationError& e) {
    std::cerr << "invalid config:\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 2;
}
