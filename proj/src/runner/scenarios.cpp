#include "pilotwave/runner/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "pilotwave/csv.hpp"
#include "pilotwave/errors.hpp"
#include "pilotwave/measurement.hpp"
#include "pilotwave/propagator.hpp"
#include "pilotwave/spectral.hpp"
#include "pilotwave/states.hpp"
#include "pilotwave/verification/oracles.hpp"
#include "pilotwave/weak.hpp"

namespace pilotwave::runner {

SpatialGrid scenario_grid(const ScenarioConfig& c) {
  return SpatialGrid(c.grid.x_min, c.grid.x_max, c.grid.n_points);
}

WaveFunction initial_state(const ScenarioConfig& c) {
  const auto grid = scenario_grid(c);
  const auto& s = c.state;
  if (s.kind == "gaussian") return gaussian_packet(grid, s.center, s.sigma, s.k0);
  if (s.kind == "plane_wave") return plane_wave(grid, s.k_index);
  if (s.kind == "harmonic_ground") return harmonic_ground_state(grid, s.omega, s.center, c.constants);
  WaveFunction::Amplitudes a(grid.size(), cplx(0.0, 0.0));
  for (const auto& t : s.terms) {
    const auto g = gaussian_packet(grid, t.center, t.sigma, t.k0);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += cplx(t.re, t.im) * g[i];
  }
  return normalize(WaveFunction(grid, std::move(a)));
}

Potential scenario_potential(const ScenarioConfig& c) {
  const auto& p = c.potential;
  if (p.kind == "harmonic") return Potential::harmonic(p.omega, p.x_center);
  if (p.kind == "gaussian_barrier") return Potential::gaussian_barrier(p.height, p.width, p.x_center);
  return Potential::free();
}

namespace {

std::string fmt(double v) { return format_number(v); }

// Writes one output file and records it in the manifest.
class Outputs {
 public:
  Outputs(std::filesystem::path dir, RunManifest& manifest) : dir_(std::move(dir)), m_(manifest) {}

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOFailure("cannot write " + path.string());
    body(out);
    if (!out) throw IOFailure("failed writing " + path.string());
    m_.outputs.push_back(name);
  }

 private:
  std::filesystem::path dir_;
  RunManifest& m_;
};

LinearOperator protocol_operator(const ScenarioConfig& c) {
  if (c.protocol.op == "position") return LinearOperator::position();
  if (c.protocol.op == "momentum") return LinearOperator::momentum();
  return LinearOperator::velocity();
}

std::vector<WaveFunction> run_evolution(const ScenarioConfig& c, const WaveFunction& psi0,
                                        const Potential& pot) {
  const double dt = c.evolution.dt > 0.0 ? c.evolution.dt : default_time_step(psi0.grid(), c.constants);
  return evolve(psi0, pot, EvolutionPlan{dt, c.evolution.n_steps, c.evolution.snapshot_stride}, c.constants);
}

double time_step(const ScenarioConfig& c, const SpatialGrid& grid) {
  return c.evolution.dt > 0.0 ? c.evolution.dt : default_time_step(grid, c.constants);
}

void check_norm(const ScenarioConfig& c, std::span<const WaveFunction> snaps, RunManifest& m) {
  double drift = 0.0;
  for (const auto& s : snaps) drift = std::max(drift, std::abs(s.norm_squared() - 1.0));
  m.checks.push_back(at_most("norm drift over the evolution", drift, drift, c.tolerance("norm_drift")));
}

void check_ensemble_identities(const ScenarioConfig& c, const WaveFunction& psi, const Potential& pot,
                               const std::string& when, RunManifest& m) {
  const std::vector<LinearOperator> ops{LinearOperator::position(), LinearOperator::velocity(),
                                        LinearOperator::hamiltonian(pot)};
  for (const auto& op : ops) {
    const auto avg = ensemble_average(op, psi, c.constants, c.ensemble.density_floor);
    const double exact = expectation(op, psi, c.constants);
    m.checks.push_back(at_most("ensemble average of " + op.label() + " equals <psi|" + op.label() + "|psi> (" + when + ")",
                               avg.value, std::abs(avg.value - exact),
                               c.tolerance("identity") + avg.leakage_bound()));
  }
}

void check_energy_identity(const ScenarioConfig& c, const WaveFunction& psi, const Potential& pot,
                           RunManifest& m) {
  const auto local = local_expectation(LinearOperator::hamiltonian(pot), psi, c.constants, c.ensemble.density_floor);
  const auto total = bohmian_energy(psi, pot, c.constants, c.ensemble.density_floor).total();
  double worst = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (!local.node_mask[i]) worst = std::max(worst, std::abs(local.values[i] - total[i]));
  }
  m.checks.push_back(at_most("Bohmian energy equals local expectation of H", worst, worst, c.tolerance("identity")));
}

void check_equivariance(const ScenarioConfig& c, const TrajectoryEnsemble& ens,
                        std::span<const WaveFunction> snaps, RunManifest& m) {
  const double d0 = equivariance_distance(ens, snaps.front(), c.ensemble.n_bins);
  const double d1 = equivariance_distance(ens, snaps.back(), c.ensemble.n_bins);
  m.observations.emplace_back("equivariance_distance_t0", d0);
  m.checks.push_back(at_most("equivariance distance at final time", d1, d1, c.tolerance("equivariance_tv")));
  m.checks.push_back(at_most("equivariance distance growth", d1 - d0, d1 - d0, c.tolerance("equivariance_growth")));
  const auto crossings = static_cast<double>(count_crossings(ens));
  m.checks.push_back(at_most("trajectory order violations", crossings, crossings, 0.5));
  m.observations.emplace_back("frozen_trajectories", static_cast<double>(ens.frozen_count()));
}

// d|psi|^2/dt + dJ/dx at the middle snapshot, centered in time.
void check_continuity(const ScenarioConfig& c, std::span<const WaveFunction> snaps, const Potential& pot,
                      RunManifest& m) {
  const auto& grid = snaps.front().grid();
  const double dt = time_step(c, grid);
  const SplitOperatorPropagator prop(grid, pot, dt, c.constants);
  const auto& before = snaps[snaps.size() / 2];
  const auto mid = prop.step(before);
  const auto after = prop.step(mid);
  const auto j = current_density(mid, c.constants);
  const auto dj = spectral::derivative(grid, std::vector<cplx>(j.begin(), j.end()), 1);
  double res = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double drho = (std::norm(after[i]) - std::norm(before[i])) / (2.0 * dt);
    res = std::max(res, std::abs(drho + dj[i].real()));
    scale = std::max(scale, std::abs(drho));
  }
  const double rel = scale > 0.0 ? res / scale : res;
  m.checks.push_back(at_most("continuity equation relative residual", rel, rel, c.tolerance("continuity")));
}

TrajectoryEnsemble trajectories(const ScenarioConfig& c, std::span<const WaveFunction> snaps) {
  TrajectoryOptions opt;
  opt.density_floor = c.ensemble.density_floor;
  opt.seed = c.seed;
  const auto x0 = sample_quantum_equilibrium(snaps.front(), c.ensemble.n_trajectories, c.seed);
  return integrate_trajectories(x0, snaps, c.constants, opt);
}

void write_field_outputs(const ScenarioConfig& c, std::span<const WaveFunction> snaps, Outputs& out) {
  out.write("densities.csv", [&](std::ostream& os) { write_density_csv(snaps, os); });
  const auto field = velocity_field(snaps.back(), c.constants, c.ensemble.density_floor);
  out.write("velocity_field.csv", [&](std::ostream& os) { write_velocity_csv(field, os); });
}

void free_gaussian(const ScenarioConfig& c, RunManifest& m, Outputs& out) {
  const auto grid = scenario_grid(c);
  const auto pot = scenario_potential(c);
  const auto psi0 = initial_state(c);
  const auto snaps = run_evolution(c, psi0, pot);
  const auto& s = c.state;
  check_norm(c, snaps, m);

  const auto& last = snaps.back();
  const double t = last.time();
  double m0 = 0, m1 = 0, m2 = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double rho = std::norm(last[i]);
    m0 += rho;
    m1 += rho * grid.x(i);
    m2 += rho * grid.x(i) * grid.x(i);
  }
  const double center = m1 / m0, width = std::sqrt(m2 / m0 - center * center);
  const double w_exact = oracles::free_gaussian_width(s.sigma, t, c.constants);
  const double c_exact = oracles::free_gaussian_center(s.center, s.k0, t, c.constants);
  m.checks.push_back(at_most("packet width vs analytic", width, std::abs(width / w_exact - 1.0), c.tolerance("width_rel")));
  const double c_rel = std::abs(center - c_exact) / std::max(std::abs(c_exact), w_exact);
  m.checks.push_back(at_most("packet center vs analytic", center, c_rel, c.tolerance("center_rel")));
  m.observations.emplace_back("spreading_factor", w_exact / s.sigma);

  const auto ens = trajectories(c, snaps);
  double worst = 0.0;
  for (std::size_t j = 0; j < ens.size(); ++j) {
    if (ens.frozen(j)) continue;
    for (std::size_t k = 0; k < snaps.size(); ++k) {
      const double tk = ens.times()[k];
      const double exact = oracles::free_gaussian_trajectory(ens.unwrapped(j, 0), s.center, s.sigma, s.k0, tk, c.constants);
      worst = std::max(worst, std::abs(ens.unwrapped(j, k) - exact) / oracles::free_gaussian_width(s.sigma, tk, c.constants));
    }
  }
  m.checks.push_back(at_most("trajectories vs scaling flow (error / width)", worst, worst, c.tolerance("trajectory_rel")));
  check_equivariance(c, ens, snaps, m);
  check_ensemble_identities(c, psi0, pot, "t = 0", m);
  check_energy_identity(c, psi0, pot, m);

  write_field_outputs(c, snaps, out);
  out.write("trajectories.csv", [&](std::ostream& os) { write_trajectories_csv(ens, os); });
}

void plane_wave_scenario(const ScenarioConfig& c, RunManifest& m, Outputs& out) {
  const auto grid = scenario_grid(c);
  const auto pot = scenario_potential(c);
  const auto snaps = run_evolution(c, initial_state(c), pot);
  check_norm(c, snaps, m);
  const double v = c.constants.hbar * grid.wavenumber_of(c.state.k_index) / c.constants.mass;

  const auto field = velocity_field(snaps.front(), c.constants, c.ensemble.density_floor);
  double worst_v = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    worst_v = std::max(worst_v, field.node_mask[i] ? INFINITY : std::abs(field.values[i] - v));
  }
  m.checks.push_back(at_most("velocity field equals hbar k / m", v, worst_v, c.tolerance("velocity_identity")));

  const auto ens = trajectories(c, snaps);
  double worst = 0.0;
  for (std::size_t j = 0; j < ens.size(); ++j) {
    for (std::size_t k = 0; k < snaps.size(); ++k) {
      const double expected = grid.wrap(ens.position(j, 0) + v * (ens.times()[k] - ens.times()[0]));
      double d = std::abs(ens.position(j, k) - expected);
      d = std::min(d, grid.length() - d);
      worst = std::max(worst, d);
    }
  }
  m.checks.push_back(at_most("trajectories x0 + v t mod L", worst, worst, c.tolerance("trajectory_abs")));
  write_field_outputs(c, snaps, out);
  out.write("trajectories.csv", [&](std::ostream& os) { write_trajectories_csv(ens, os); });
}

void superposition(const ScenarioConfig& c, RunManifest& m, Outputs& out) {
  const auto grid = scenario_grid(c);
  const auto pot = scenario_potential(c);
  const auto psi0 = initial_state(c);
  const auto snaps = run_evolution(c, psi0, pot);
  check_norm(c, snaps, m);
  const auto ens = trajectories(c, snaps);
  check_equivariance(c, ens, snaps, m);
  if (snaps.size() >= 2) check_continuity(c, snaps, pot, m);
  check_ensemble_identities(c, psi0, pot, "t = 0", m);
  check_ensemble_identities(c, snaps.back(), pot, "final time", m);
  check_energy_identity(c, snaps.back(), pot, m);
  write_field_outputs(c, snaps, out);
  out.write("trajectories.csv", [&](std::ostream& os) { write_trajectories_csv(ens, os); });
}

void harmonic(const ScenarioConfig& c, RunManifest& m, Outputs& out) {
  const auto grid = scenario_grid(c);
  const auto pot = scenario_potential(c);
  const auto psi0 = initial_state(c);
  const auto snaps = run_evolution(c, psi0, pot);
  check_norm(c, snaps, m);

  double moved = 0.0;
  for (const auto& s : snaps) {
    for (std::size_t i = 0; i < grid.size(); ++i) moved = std::max(moved, std::abs(std::abs(s[i]) - std::abs(psi0[i])));
  }
  m.checks.push_back(at_most("|psi| stationary", moved, moved, c.tolerance("stationary")));

  const double e0 = 0.5 * c.constants.hbar * c.state.omega;
  const auto energy = bohmian_energy(psi0, pot, c.constants, c.ensemble.density_floor);
  const auto total = energy.total();
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!energy.node_mask[i]) worst = std::max(worst, std::abs(total[i] - e0));
  }
  m.checks.push_back(at_most("Bohmian energy equals hbar omega / 2", e0, worst, c.tolerance("eigen_energy")));
  check_energy_identity(c, psi0, pot, m);
  check_ensemble_identities(c, psi0, pot, "t = 0", m);

  const auto ens = trajectories(c, snaps);
  double drift = 0.0;
  for (std::size_t j = 0; j < ens.size(); ++j) {
    for (std::size_t k = 0; k < snaps.size(); ++k) drift = std::max(drift, std::abs(ens.unwrapped(j, k) - ens.unwrapped(j, 0)));
  }
  m.checks.push_back(at_most("trajectories stand still", drift, drift, c.tolerance("trajectory_abs")));

  write_field_outputs(c, snaps, out);
  out.write("energy.csv", [&](std::ostream& os) { write_energy_csv(energy, os); });
  out.write("trajectories.csv", [&](std::ostream& os) { write_trajectories_csv(ens, os); });
}

void counterexample(const ScenarioConfig& c, RunManifest& m, Outputs& out) {
  const auto grid = scenario_grid(c);
  const auto& ce = c.counterexample;
  const auto r = counterexample_v_plus_x(ce.k_index, ce.x_o, grid, c.constants);
  auto entries = report_entries(r, c.tolerance("weak_value"));
  const auto sum = sum_rule_check(LinearOperator::velocity(), LinearOperator::position(), plane_wave(grid, ce.k_index),
                                  grid_delta(grid, ce.x_o), r.expected_velocity, r.x_node, c.constants, 1e-8);
  for (auto& e : report_entries(sum, "sum rule", 1e-8, 1e-6)) entries.push_back(e);
  m.checks.insert(m.checks.end(), entries.begin(), entries.end());
  m.observations.emplace_back("x_node", r.x_node);
  out.write("weak_values.json", [&](std::ostream& os) { write_report_json(entries, os); });
}

WaveFunction protocol_state(const ScenarioConfig& c) {
  const auto grid = scenario_grid(c);
  return run_evolution(c, initial_state(c), scenario_potential(c)).back();
}

Pointer make_pointer(const ScenarioConfig& c) {
  const auto& p = c.protocol.pointer;
  return Pointer(SpatialGrid(p.y_min, p.y_max, p.n_points), p.sigma);
}

ProtocolConfig protocol_config(const ScenarioConfig& c, double g) {
  ProtocolConfig p;
  p.coupling_g = g;
  p.n_runs = c.protocol.n_runs;
  p.f_bin_width = c.protocol.f_bin_width;
  p.seed = c.seed;
  p.density_floor = c.ensemble.density_floor;
  p.keep_pairs = c.protocol.keep_pairs;
  return p;
}

void protocol(const ScenarioConfig& c, RunManifest& m, Outputs& out) {
  const auto psi = protocol_state(c);
  const auto op = protocol_operator(c);
  const auto pointer = make_pointer(c);
  const double g = c.protocol.coupling_g;

  const auto local = local_expectation(op, psi, c.constants, c.ensemble.density_floor);
  double sup = 0.0;
  for (double v : local.values) {
    if (std::isfinite(v)) sup = std::max(sup, std::abs(v));
  }
  const double regime = g * sup / pointer.sigma();
  m.checks.push_back(at_most("weak regime g sup|S| / sigma_ptr", regime, regime, c.tolerance("weak_regime")));

  const auto outcome = run_protocol(psi, op, pointer, protocol_config(c, g), c.constants);
  std::size_t total = 0;
  for (const auto& b : outcome.bins) {
    total += b.count;
    if (!b.central) continue;
    const double z = std::abs(b.deviation()) / b.standard_error;
    m.checks.push_back(at_most("bin " + fmt(b.center) + ": |estimate - exact| in standard errors", b.estimate, z,
                               c.tolerance("standard_errors")));
  }
  const double missing = std::abs(static_cast<double>(total) - static_cast<double>(c.protocol.n_runs));
  m.checks.push_back(at_most("bin counts sum to n_runs", static_cast<double>(total), missing, 0.5));
  m.observations.emplace_back("state_time", psi.time());

  out.write("protocol.csv", [&](std::ostream& os) { write_protocol_csv(outcome, os); });
  if (c.protocol.keep_pairs) out.write("pairs.csv", [&](std::ostream& os) { write_pairs_csv(outcome, os); });
  out.write("velocity_field.csv", [&](std::ostream& os) {
    write_velocity_csv(velocity_field(psi, c.constants, c.ensemble.density_floor), os);
  });
}

void bias(const ScenarioConfig& c, RunManifest& m, Outputs& out) {
  const auto psi = protocol_state(c);
  const auto report = bias_scan(psi, protocol_operator(c), make_pointer(c), c.protocol.g_values,
                                protocol_config(c, c.protocol.g_values.front()), c.constants);
  const auto ratios = report.quadrature_ratios();
  for (std::size_t n = 0; n < ratios.size(); ++n) {
    m.checks.push_back(at_most("bias ratio g " + fmt(report.entries[n + 1].g) + " / " + fmt(report.entries[n].g),
                               ratios[n], ratios[n], c.tolerance("bias_ratio")));
  }
  for (const auto& e : report.entries) {
    m.observations.emplace_back("sampled_bias_g" + fmt(e.g), e.sampled_bias);
    m.observations.emplace_back("sampled_bias_stderr_g" + fmt(e.g), e.standard_error);
  }
  out.write("bias_scan.csv", [&](std::ostream& os) {
    os << "g,quadrature_bias,sampled_bias,stderr,estimate,exact_value\n";
    for (const auto& e : report.entries) {
      os << fmt(e.g) << ',' << fmt(e.quadrature_bias) << ',' << fmt(e.sampled_bias) << ',' << fmt(e.standard_error)
         << ',' << fmt(e.estimate) << ',' << fmt(e.exact_value) << '\n';
    }
  });
}

void backaction(const ScenarioConfig& c, RunManifest& m, Outputs& out) {
  const auto psi = protocol_state(c);
  const auto op = protocol_operator(c);
  const auto pointer = make_pointer(c);
  const auto pot = scenario_potential(c);
  BackactionOptions opt;
  opt.n_trajectories = c.protocol.n_trajectories;
  opt.n_steps = c.protocol.n_steps;
  opt.snapshot_stride = c.protocol.snapshot_stride;
  opt.seed = c.seed;
  opt.integrator_tolerance = c.tolerance("integrator");

  auto gs = c.protocol.g_values;
  std::sort(gs.begin(), gs.end());
  std::vector<BackactionReport> reports;
  for (double g : gs) reports.push_back(backaction_demo(psi, op, pointer, g, c.protocol.horizon, pot, c.constants, opt));

  const double tol = opt.integrator_tolerance;
  const BackactionReport* previous = nullptr;
  for (const auto& r : reports) {
    if (r.g == 0.0) {
      m.checks.push_back(at_most("g = 0 divergence below integrator tolerance", r.max_divergence, r.max_divergence, tol));
      continue;
    }
    m.checks.push_back(at_least("g = " + fmt(r.g) + " divergence over " + fmt(c.tolerance("backaction_factor")) +
                                    " x integrator tolerance",
                                r.max_divergence, c.tolerance("backaction_factor") * tol));
    if (previous != nullptr && previous->g > 0.0) {
      m.checks.push_back(at_least("divergence increases from g = " + fmt(previous->g) + " to " + fmt(r.g),
                                  r.max_divergence - previous->max_divergence, 0.0));
    }
    previous = &r;
  }
  out.write("backaction.csv", [&](std::ostream& os) {
    os << "g,max_divergence,mean_divergence,frozen\n";
    for (const auto& r : reports) {
      os << fmt(r.g) << ',' << fmt(r.max_divergence) << ',' << fmt(r.mean_divergence) << ',' << r.frozen << '\n';
    }
  });
}

}  // namespace

void write_density_csv(std::span<const WaveFunction> snapshots, std::ostream& out) {
  out << "t,x,density\n";
  for (const auto& s : snapshots) {
    const auto rho = s.density();
    for (std::size_t i = 0; i < s.size(); ++i) {
      out << fmt(s.time()) << ',' << fmt(s.grid().x(i)) << ',' << fmt(rho[i]) << '\n';
    }
  }
}

void write_velocity_csv(const VelocityField& field, std::ostream& out) {
  out << "x,v,masked\n";
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    out << fmt(field.grid.x(i)) << ',' << fmt(field.values[i]) << ',' << (field.node_mask[i] ? 1 : 0) << '\n';
  }
}

void write_energy_csv(const BohmianEnergyField& e, std::ostream& out) {
  out << "x,kinetic,classical,quantum,total,masked\n";
  const auto total = e.total();
  for (std::size_t i = 0; i < total.size(); ++i) {
    out << fmt(e.grid.x(i)) << ',' << fmt(e.kinetic[i]) << ',' << fmt(e.classical[i]) << ',' << fmt(e.quantum[i])
        << ',' << fmt(total[i]) << ',' << (e.node_mask[i] ? 1 : 0) << '\n';
  }
}

std::filesystem::path resolve_output_dir(const ScenarioConfig& config) {
  if (const char* env = std::getenv("PILOTWAVE_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    return std::filesystem::path(env) / std::string(scenario_name(config.scenario));
  }
  return config.output_dir;
}

RunManifest run_scenario(const ScenarioConfig& config, const std::filesystem::path& output_dir) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest m;
  m.scenario = std::string(scenario_name(config.scenario));
  m.seed = config.seed;
  m.config_json = config_to_json(config);
  m.started_utc = utc_now();
  m.output_dir = output_dir.string();

  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) throw IOFailure("cannot create " + output_dir.string() + ": " + ec.message());
  Outputs out(output_dir, m);

  try {
    switch (config.scenario) {
      case Scenario::FreeGaussian: free_gaussian(config, m, out); break;
      case Scenario::PlaneWave: plane_wave_scenario(config, m, out); break;
      case Scenario::TwoGaussianSuperposition: superposition(config, m, out); break;
      case Scenario::HarmonicOscillator: harmonic(config, m, out); break;
      case Scenario::CounterexampleVPlusX: counterexample(config, m, out); break;
      case Scenario::ProtocolVelocity: protocol(config, m, out); break;
      case Scenario::BiasScan: bias(config, m, out); break;
      case Scenario::Backaction: backaction(config, m, out); break;
    }
  } catch (const IOFailure&) {
    throw;
  } catch (const Error& e) {
    throw Error(m.scenario + ": " + e.what());
  }

  m.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(m, output_dir / "manifest.json");
  return m;
}

}  // namespace pilotwave::runner
