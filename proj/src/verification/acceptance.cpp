#include "pilotwave/verification/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pilotwave/bohm.hpp"
#include "pilotwave/csv.hpp"
#include "pilotwave/errors.hpp"
#include "pilotwave/propagator.hpp"
#include "pilotwave/runner/manifest.hpp"
#include "pilotwave/runner/scenarios.hpp"
#include "pilotwave/states.hpp"
#include "pilotwave/verification/oracles.hpp"
#include "pilotwave/weak.hpp"

namespace pilotwave::acceptance {

namespace fs = std::filesystem;
using runner::Scenario;

namespace {

constexpr PhysicalConstants kNatural{1.0, 1.0};

struct Context {
  fs::path root;
  std::uint64_t seed;
};

runner::ScenarioConfig config_for(Scenario s, const Context& ctx) {
  auto c = runner::default_config(s);
  c.seed = ctx.seed;
  return c;
}

// Runs a shipped scenario into the criterion directory and returns its checks
// prefixed with the scenario name.
std::vector<ReportEntry> scenario_checks(runner::ScenarioConfig c, const fs::path& dir, const std::string& tag = "") {
  const std::string name = tag.empty() ? std::string(runner::scenario_name(c.scenario)) : tag;
  const auto m = runner::run_scenario(c, dir / name);
  std::vector<ReportEntry> out;
  for (auto e : m.checks) {
    e.label = name + ": " + e.label;
    out.push_back(std::move(e));
  }
  return out;
}

const std::vector<Scenario>& shipped_states() {
  static const std::vector<Scenario> s{Scenario::FreeGaussian, Scenario::TwoGaussianSuperposition,
                                       Scenario::HarmonicOscillator};
  return s;
}

double max_off_mask(std::span<const double> a, std::span<const double> b, std::span<const std::uint8_t> mask) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!mask[i]) worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

// 1: S_B for X is the coordinate itself, with no arithmetic in between.
std::vector<ReportEntry> position_identity(const Context& ctx) {
  std::vector<ReportEntry> out;
  for (auto s : shipped_states()) {
    const auto c = config_for(s, ctx);
    const auto psi = runner::initial_state(c);
    const auto f = local_expectation(LinearOperator::position(), psi, c.constants);
    double worst = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const double d = std::abs(f.values[i] - psi.grid().x(i));
      worst = std::isnan(d) ? d : std::max(worst, d);
    }
    out.push_back(exactly_zero(std::string(runner::scenario_name(s)) + ": max |S_X - x|", worst, worst));
  }
  return out;
}

// 2: S_B for V against J/|psi|^2 and against the analytic field of the packet.
std::vector<ReportEntry> velocity_identity(const Context&) {
  const SpatialGrid grid(-40.0, 40.0, 1024);
  const double k0 = 1.0;
  std::vector<ReportEntry> out;
  const auto check = [&](const WaveFunction& psi, const std::string& tag, double t) {
    const auto s = local_expectation(LinearOperator::velocity(), psi, kNatural);
    const auto v = velocity_field(psi, kNatural);
    out.push_back(at_most(tag + ": max |S_V - J/|psi|^2| off mask", 0.0,
                          max_off_mask(s.values, v.values, s.node_mask), 1e-10));
    // Free Gaussian: v(x, t) = v0 + (x - x0 - v0 t) (t/4 sigma^4) / (1 + (t/2 sigma^2)^2) for hbar = m = sigma = 1.
    std::vector<double> exact(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double d = grid.x(i) - k0 * t;
      exact[i] = k0 + d * (t / 4.0) / (1.0 + t * t / 4.0);
    }
    out.push_back(at_most(tag + ": max |S_V - analytic v| off mask", 0.0,
                          max_off_mask(s.values, exact, s.node_mask), 1e-10));
  };
  check(gaussian_packet(grid, 0.0, 1.0, k0), "t = 0", 0.0);
  check(oracles::free_gaussian_state(grid, 0.0, 1.0, k0, 1.0, kNatural), "t = 1", 1.0);
  return out;
}

std::vector<ReportEntry> counterexample(const Context& ctx) {
  return scenario_checks(config_for(Scenario::CounterexampleVPlusX, ctx), ctx.root);
}

// 4: random Hermitian pairs with prescribed eigenvectors.
std::vector<ReportEntry> sum_rule(const Context& ctx) {
  std::vector<ReportEntry> out;
  for (std::uint64_t n = 0; n < 20; ++n) {
    const auto inst = oracles::random_sum_rule_instance(ctx.seed * 1000 + n);
    const auto p_op = LinearOperator::dense(inst.p_matrix, "P");
    const auto q_op = LinearOperator::dense(inst.q_matrix, "Q");
    const auto r = sum_rule_check(p_op, q_op, inst.psi_i, inst.psi_f, inst.p, inst.q, kNatural, 1e-8);
    const std::string tag = "instance " + std::to_string(n);
    for (auto& e : report_entries(r, tag, 1e-8, 1e-6)) out.push_back(std::move(e));
    const double brute = oracles::brute_force_weak_value(inst.p_matrix, inst.psi_i, inst.psi_f).real() +
                         oracles::brute_force_weak_value(inst.q_matrix, inst.psi_i, inst.psi_f).real();
    out.push_back(at_most(tag + ": matches explicit matrix sums", r.sum_weak.value, std::abs(r.sum_weak.value - brute), 1e-10));
  }
  return out;
}

// 5: sum over cells of S_B |psi|^2 dx against <psi|S|psi>.
std::vector<ReportEntry> ensemble_identity(const Context& ctx) {
  std::vector<ReportEntry> out;
  for (auto s : shipped_states()) {
    const auto c = config_for(s, ctx);
    const auto psi = runner::initial_state(c);
    const auto pot = runner::scenario_potential(c);
    for (const auto& op : {LinearOperator::position(), LinearOperator::velocity(), LinearOperator::hamiltonian(pot)}) {
      const auto avg = ensemble_average(op, psi, c.constants, c.ensemble.density_floor);
      const double exact = expectation(op, psi, c.constants);
      out.push_back(at_most(std::string(runner::scenario_name(s)) + ": " + op.label(), avg.value,
                            std::abs(avg.value - exact), 1e-8 + avg.leakage_bound()));
    }
  }
  return out;
}

// 6: kinetic + classical + quantum potential against S_H.
std::vector<ReportEntry> energy_identity(const Context& ctx) {
  std::vector<ReportEntry> out;
  for (auto s : shipped_states()) {
    const auto c = config_for(s, ctx);
    const auto psi = runner::initial_state(c);
    const auto pot = runner::scenario_potential(c);
    const auto local = local_expectation(LinearOperator::hamiltonian(pot), psi, c.constants, c.ensemble.density_floor);
    const auto energy = bohmian_energy(psi, pot, c.constants, c.ensemble.density_floor);
    const auto total = energy.total();
    out.push_back(at_most(std::string(runner::scenario_name(s)) + ": max |E_Bohm - S_H| off mask", 0.0,
                          max_off_mask(total, local.values, local.node_mask), 1e-8));
    if (s == Scenario::HarmonicOscillator) {
      const std::vector<double> half(total.size(), 0.5);
      out.push_back(at_most("harmonic_oscillator: max |E_Bohm - 1/2| off mask", 0.5,
                            max_off_mask(total, half, energy.node_mask), 1e-6));
    }
  }
  return out;
}

std::vector<ReportEntry> equivariance(const Context& ctx) {
  auto out = scenario_checks(config_for(Scenario::FreeGaussian, ctx), ctx.root);
  for (auto& e : scenario_checks(config_for(Scenario::TwoGaussianSuperposition, ctx), ctx.root)) out.push_back(std::move(e));
  return out;
}

// 8: propagator against closed forms; independent of the trajectory code.
std::vector<ReportEntry> propagator(const Context& ctx) {
  const auto c = config_for(Scenario::FreeGaussian, ctx);
  const auto psi0 = runner::initial_state(c);
  const auto snaps = evolve(psi0, Potential::free(),
                            EvolutionPlan{c.evolution.dt, c.evolution.n_steps, c.evolution.snapshot_stride}, c.constants);
  std::vector<ReportEntry> out;
  double drift = 0.0;
  for (const auto& s : snaps) drift = std::max(drift, std::abs(s.norm_squared() - 1.0));
  out.push_back(at_most("norm drift over " + std::to_string(c.evolution.n_steps) + " steps", drift, drift, 1e-10));

  const auto& last = snaps.back();
  const auto& grid = last.grid();
  const auto rho = last.density();
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    m0 += rho[i];
    m1 += rho[i] * grid.x(i);
    m2 += rho[i] * grid.x(i) * grid.x(i);
  }
  const double center = m1 / m0, width = std::sqrt(m2 / m0 - center * center);
  const double w = oracles::free_gaussian_width(c.state.sigma, last.time(), c.constants);
  const double x = oracles::free_gaussian_center(c.state.center, c.state.k0, last.time(), c.constants);
  out.push_back(at_most("width relative error", width, std::abs(width / w - 1.0), 1e-3));
  out.push_back(at_most("center error / max(|center|, width)", center, std::abs(center - x) / std::max(std::abs(x), w), 1e-3));

  // Strang error against the exact coherent state: ratio 4 at second order.
  const SpatialGrid hg(-20.0, 20.0, 256);
  const auto coherent0 = oracles::coherent_state(hg, 1.0, 2.0, 0.0, kNatural);
  const double horizon = 2.0 * M_PI;
  const auto error_for = [&](std::size_t steps) {
    const auto s = evolve(coherent0, Potential::harmonic(1.0), {horizon / steps, steps, steps}, kNatural);
    return oracles::phase_aligned_distance(s.back(), oracles::coherent_state(hg, 1.0, 2.0, horizon, kNatural));
  };
  const double ratio = error_for(200) / error_for(400);
  out.push_back(at_least("dt-halving error ratio above 3", ratio, 3.0));
  out.push_back(at_most("dt-halving error ratio below 5", ratio, ratio, 5.0));
  return out;
}

std::vector<ReportEntry> protocol(const Context& ctx) {
  auto out = scenario_checks(config_for(Scenario::ProtocolVelocity, ctx), ctx.root);
  auto plain = config_for(Scenario::ProtocolVelocity, ctx);
  plain.evolution.n_steps = 0;
  plain.evolution.snapshot_stride = 1;
  for (auto& e : scenario_checks(plain, ctx.root, "protocol_velocity_t0")) out.push_back(std::move(e));
  for (auto& e : scenario_checks(config_for(Scenario::BiasScan, ctx), ctx.root)) out.push_back(std::move(e));
  return out;
}

std::vector<ReportEntry> backaction(const Context& ctx) {
  return scenario_checks(config_for(Scenario::Backaction, ctx), ctx.root);
}

struct Criterion {
  int id;
  const char* title;
  double runtime_limit;
  std::function<std::vector<ReportEntry>(const Context&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {1, "local expectation of X is the grid coordinate", 1.0, position_identity},
      {2, "local expectation of V equals J/|psi|^2", 1.0, velocity_identity},
      {3, "weak values of V, X and V + X for the plane-wave counterexample", 1.0, counterexample},
      {4, "sum rule on 20 random Hermitian pairs", 5.0, sum_rule},
      {5, "ensemble average of S_B equals <psi|S|psi> for X, V, H", 2.0, ensemble_identity},
      {6, "Bohmian energy equals local expectation of H; oscillator ground state 1/2", 2.0, energy_identity},
      {7, "equivariance and no-crossing for 10^4 trajectories", 60.0, equivariance},
      {8, "propagator against analytic packets, norm drift, dt-halving", 30.0, propagator},
      {9, "weak measurement protocol and bias scan", 300.0, protocol},
      {10, "measurement backaction on trajectories", 120.0, backaction},
  };
  return list;
}

std::string two_digits(int id) { return (id < 10 ? "0" : "") + std::to_string(id); }

CriterionResult run_one(const Criterion& c, const fs::path& root, std::uint64_t seed) {
  const fs::path dir = root / ("criterion_" + two_digits(c.id));
  fs::create_directories(dir);
  CriterionResult r{c.id, c.title, {}, 0.0, c.runtime_limit};
  const auto start = std::chrono::steady_clock::now();
  try {
    r.checks = c.run(Context{dir, seed});
  } catch (const std::exception& e) {
    r.checks.push_back({std::string("completed without error: ") + e.what(), NAN, NAN, 0.0, false});
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ofstream out(dir / "criterion.json", std::ios::binary);
  if (!out) throw IOFailure("cannot write " + (dir / "criterion.json").string());
  write_report_json(r.checks, out);

  r.checks.push_back(at_most("runtime under " + format_number(c.runtime_limit) + " s", r.seconds, r.seconds,
                             c.runtime_limit));
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::set<std::string> relative_files(const fs::path& root) {
  std::set<std::string> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.insert(fs::relative(e.path(), root).generic_string());
  }
  return out;
}

}  // namespace

std::vector<std::string> differing_files(const fs::path& a, const fs::path& b) {
  const auto fa = relative_files(a), fb = relative_files(b);
  std::set<std::string> all = fa;
  all.insert(fb.begin(), fb.end());
  std::vector<std::string> diff;
  for (const auto& f : all) {
    if (!fa.count(f) || !fb.count(f)) {
      diff.push_back(f);
      continue;
    }
    auto ta = read_file(a / f), tb = read_file(b / f);
    if (fs::path(f).filename() == "manifest.json") {
      ta = runner::without_environment(ta);
      tb = runner::without_environment(tb);
    }
    if (ta != tb) diff.push_back(f);
  }
  return diff;
}

std::string summary_line(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.passed() ? "[PASS] " : "[FAIL] ") << two_digits(r.id) << ' ' << r.title << " ("
    << format_number(std::round(r.seconds * 1000.0) / 1000.0) << " s";
  if (r.runtime_limit > 0.0) s << ", limit " << format_number(r.runtime_limit) << " s";
  s << ')';
  for (const auto& c : r.checks) {
    if (c.pass) continue;
    s << "\n       failed: " << c.label << "  value=" << format_number(c.value)
      << " residual=" << format_number(c.residual) << ' ' << relation_symbol(c.relation) << ' '
      << format_number(c.tolerance);
  }
  return s.str();
}

std::vector<CriterionResult> run_suite(const SuiteOptions& options, std::ostream& log) {
  const fs::path first = options.output_dir / "run_1";
  const fs::path second = options.output_dir / "run_2";
  std::error_code ec;
  fs::remove_all(first, ec);
  fs::remove_all(second, ec);

  std::vector<CriterionResult> results;
  for (const auto& c : criteria()) {
    results.push_back(run_one(c, first, options.seed));
    log << summary_line(results.back()) << std::endl;
  }

  if (options.determinism) {
    CriterionResult r{11, "identical outputs from a second run with the same seed", {}, 0.0, 0.0};
    const auto start = std::chrono::steady_clock::now();
    for (const auto& c : criteria()) run_one(c, second, options.seed);
    const auto diff = differing_files(first, second);
    const auto files = relative_files(first).size();
    r.checks.push_back(at_least("files compared", static_cast<double>(files), 0.0));
    for (const auto& f : diff) r.checks.push_back({"identical: " + f, NAN, 1.0, 0.0, false});
    if (diff.empty()) r.checks.push_back(exactly_zero("differing files", 0.0, 0.0));
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
    log << summary_line(results.back()) << std::endl;
  }

  nlohmann::json doc;
  doc["criteria"] = nlohmann::json::array();
  doc["environment"]["seconds"] = nlohmann::json::object();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed();
    doc["criteria"].push_back({{"id", r.id}, {"title", r.title}, {"pass", r.passed()}});
    doc["environment"]["seconds"][two_digits(r.id)] = r.seconds;
  }
  doc["passed"] = all;
  doc["seed"] = options.seed;
  doc["version"] = runner::artifact_version();
  std::ofstream out(options.output_dir / "acceptance.json", std::ios::binary);
  if (!out) throw IOFailure("cannot write " + (options.output_dir / "acceptance.json").string());
  out << doc.dump(2) << '\n';
  return results;
}

}  // namespace pilotwave::acceptance
