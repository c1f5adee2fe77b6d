#pragma once

#include <cstddef>
#include <vector>

#include "pilotwave/potential.hpp"
#include "pilotwave/wavefunction.hpp"

namespace pilotwave {

struct EvolutionPlan {
  double dt = 0.0;
  std::size_t n_steps = 0;
  std::size_t snapshot_stride = 1;

  /// dt > 0 and snapshot_stride divides n_steps.
  void validate() const;
};

/// Largest step with hbar k_max^2 dt / 2m below 0.1 rad (Nyquist phase).
double default_time_step(const SpatialGrid& grid, const PhysicalConstants& constants);

/// Strang split-operator integrator for a fixed grid, potential and dt.
/// Phase tables are built once; stepping is const and thread-safe.
class SplitOperatorPropagator {
 public:
  SplitOperatorPropagator(const SpatialGrid& grid, const Potential& potential, double dt,
                          const PhysicalConstants& constants);

  /// exp(-iV dt/2hbar) IFFT exp(-iT dt/hbar) FFT exp(-iV dt/2hbar) psi.
  WaveFunction step(const WaveFunction& psi) const;

  /// Snapshots every `snapshot_stride` steps, including t0 and the final time.
  std::vector<WaveFunction> evolve(const WaveFunction& psi0, std::size_t n_steps,
                                   std::size_t snapshot_stride) const;

  double dt() const { return dt_; }
  const SpatialGrid& grid() const { return grid_; }

 private:
  SpatialGrid grid_;
  double dt_;
  bool free_;
  std::vector<cplx> half_potential_phase_;
  std::vector<cplx> kinetic_phase_;
};

WaveFunction split_step(const WaveFunction& psi, const Potential& potential, double dt,
                        const PhysicalConstants& constants);

std::vector<WaveFunction> evolve(const WaveFunction& psi0, const Potential& potential,
                                 const EvolutionPlan& plan, const PhysicalConstants& constants);

}  // namespace pilotwave
