#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pilotwave/grid.hpp"

namespace pilotwave::runner {

enum class Scenario {
  FreeGaussian,
  PlaneWave,
  TwoGaussianSuperposition,
  HarmonicOscillator,
  CounterexampleVPlusX,
  ProtocolVelocity,
  BiasScan,
  Backaction,
};

const std::vector<Scenario>& all_scenarios();
std::string_view scenario_name(Scenario s);
/// One-line description for `list-scenarios`.
std::string_view scenario_summary(Scenario s);

struct GridConfig {
  double x_min = -20.0;
  double x_max = 20.0;
  std::size_t n_points = 512;
};

/// Gaussian term c * gaussian_packet(center, sigma, k0) of a superposition.
struct GaussianTerm {
  double re = 1.0;
  double im = 0.0;
  double center = 0.0;
  double sigma = 1.0;
  double k0 = 0.0;
};

struct StateConfig {
  std::string kind = "gaussian";  // gaussian | plane_wave | superposition | harmonic_ground
  double center = 0.0;
  double sigma = 1.0;
  double k0 = 0.0;
  long k_index = 1;
  double omega = 1.0;
  std::vector<GaussianTerm> terms;
};

struct PotentialConfig {
  std::string kind = "free";  // free | harmonic | gaussian_barrier
  double omega = 1.0;
  double x_center = 0.0;
  double height = 1.0;
  double width = 1.0;
};

struct EvolutionConfig {
  double dt = 0.0;  // 0 selects the default step for the grid
  std::size_t n_steps = 0;
  std::size_t snapshot_stride = 1;
};

struct EnsembleConfig {
  std::size_t n_trajectories = 10000;
  std::size_t n_bins = 64;
  double density_floor = 1e-8;
};

struct PointerConfig {
  double y_min = -16.0;
  double y_max = 16.0;
  std::size_t n_points = 256;
  double sigma = 1.0;
};

struct ProtocolSection {
  std::string op = "velocity";  // velocity | position | momentum
  double coupling_g = 0.08;
  std::size_t n_runs = 100000;
  double f_bin_width = 0.625;
  bool keep_pairs = false;
  PointerConfig pointer;
  std::vector<double> g_values;  // bias_scan, backaction
  double horizon = 2.0;          // backaction
  std::size_t n_trajectories = 64;
  std::size_t n_steps = 200;
  std::size_t snapshot_stride = 10;
};

struct CounterexampleSection {
  long k_index = 4;
  double x_o = 0.5;
};

struct ScenarioConfig {
  Scenario scenario = Scenario::FreeGaussian;
  std::uint64_t seed = 1;
  std::string output_dir;
  GridConfig grid;
  PhysicalConstants constants;
  StateConfig state;
  PotentialConfig potential;
  EvolutionConfig evolution;
  EnsembleConfig ensemble;
  ProtocolSection protocol;
  CounterexampleSection counterexample;
  std::map<std::string, double> tolerances;

  double tolerance(const std::string& name) const;
};

/// Shipped configuration of a scenario; the values a minimal document gets.
ScenarioConfig default_config(Scenario s);

/// Parses one JSON document. Syntax errors and duplicate keys raise
/// ParseError with a 1-based line; every schema or invariant violation is
/// collected into one ValidationError.
ScenarioConfig parse_config(std::string_view text);

/// Complete configuration, defaults included, as JSON text.
std::string config_to_json(const ScenarioConfig& config);

}  // namespace pilotwave::runner
