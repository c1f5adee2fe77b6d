#pragma once

#include <filesystem>
#include <ostream>
#include <span>

#include "pilotwave/bohm.hpp"
#include "pilotwave/runner/config.hpp"
#include "pilotwave/runner/manifest.hpp"

namespace pilotwave::runner {

/// Runs one scenario, writes its CSV/JSON files and manifest.json into
/// `output_dir` (created if missing) and returns the manifest. Errors from
/// the modules are rethrown with the scenario name prefixed.
RunManifest run_scenario(const ScenarioConfig& config, const std::filesystem::path& output_dir);

/// The configured grid, t = 0 state and potential.
SpatialGrid scenario_grid(const ScenarioConfig& config);
WaveFunction initial_state(const ScenarioConfig& config);
Potential scenario_potential(const ScenarioConfig& config);

/// Output directory for a config: PILOTWAVE_OUTPUT_DIR when set (a
/// per-scenario subdirectory of it), else config.output_dir.
std::filesystem::path resolve_output_dir(const ScenarioConfig& config);

// Plot data. All CSV is UTF-8 with '.' decimals and '\n' line ends.

/// `t,x,density`, one block per snapshot.
void write_density_csv(std::span<const WaveFunction> snapshots, std::ostream& out);
/// `x,v,masked`; masked rows carry v = nan.
void write_velocity_csv(const VelocityField& field, std::ostream& out);
/// `x,kinetic,classical,quantum,total,masked`.
void write_energy_csv(const BohmianEnergyField& energy, std::ostream& out);

}  // namespace pilotwave::runner
