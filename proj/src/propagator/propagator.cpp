#include "pilotwave/propagator.hpp"

#include <cmath>

#include "pilotwave/errors.hpp"

namespace pilotwave {

void EvolutionPlan::validate() const {
  if (!(std::isfinite(dt) && dt > 0.0)) throw InvalidArgument("evolution dt must be > 0");
  if (snapshot_stride == 0) throw InvalidArgument("snapshot_stride must be >= 1");
  if (n_steps % snapshot_stride != 0) {
    throw InvalidArgument("snapshot_stride must divide n_steps");
  }
}

double default_time_step(const SpatialGrid& grid, const PhysicalConstants& constants) {
  constants.validate();
  const double k = grid.k_max();
  // 0.1 rad at the Nyquist mode, with a small margin to stay strictly below.
  return 0.099 * 2.0 * constants.mass / (constants.hbar * k * k);
}

SplitOperatorPropagator::SplitOperatorPropagator(const SpatialGrid& grid,
                                                 const Potential& potential, double dt,
                                                 const PhysicalConstants& constants)
    : grid_(grid), dt_(dt), free_(potential.is_free()) {
  constants.validate();
  if (!(std::isfinite(dt) && dt > 0.0)) throw InvalidArgument("time step must be > 0");

  const auto v = potential.tabulate(grid, constants);
  half_potential_phase_.resize(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    half_potential_phase_[i] = std::polar(1.0, -v[i] * dt / (2.0 * constants.hbar));
  }
  const auto k = grid.wavenumbers();
  kinetic_phase_.resize(grid.size());
  for (std::size_t j = 0; j < k.size(); ++j) {
    kinetic_phase_[j] = std::polar(1.0, -constants.hbar * k[j] * k[j] * dt / (2.0 * constants.mass));
  }
}

WaveFunction SplitOperatorPropagator::step(const WaveFunction& psi) const {
  require_same_grid(grid_, psi.grid(), "split_step");
  WaveFunction::Amplitudes a(psi.amplitudes().begin(), psi.amplitudes().end());
  if (!free_) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= half_potential_phase_[i];
  }
  auto hat = spectral::forward(a);
  for (std::size_t j = 0; j < hat.size(); ++j) hat[j] *= kinetic_phase_[j];
  a = spectral::inverse(hat);
  if (!free_) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= half_potential_phase_[i];
  }
  return WaveFunction(grid_, std::move(a), psi.time() + dt_);
}

std::vector<WaveFunction> SplitOperatorPropagator::evolve(const WaveFunction& psi0,
                                                          std::size_t n_steps,
                                                          std::size_t snapshot_stride) const {
  EvolutionPlan{dt_, n_steps, snapshot_stride}.validate();
  std::vector<WaveFunction> snapshots;
  snapshots.reserve(n_steps / snapshot_stride + 1);
  snapshots.push_back(psi0);

  const double t0 = psi0.time();
  WaveFunction current = psi0;
  for (std::size_t s = 1; s <= n_steps; ++s) {
    // time stamps from t0 + s*dt, not accumulated sums
    current = step(current).at_time(t0 + static_cast<double>(s) * dt_);
    if (s % snapshot_stride == 0) snapshots.push_back(current);
  }
  return snapshots;
}

WaveFunction split_step(const WaveFunction& psi, const Potential& potential, double dt,
                        const PhysicalConstants& constants) {
  return SplitOperatorPropagator(psi.grid(), potential, dt, constants).step(psi);
}

std::vector<WaveFunction> evolve(const WaveFunction& psi0, const Potential& potential,
                                 const EvolutionPlan& plan, const PhysicalConstants& constants) {
  plan.validate();
  return SplitOperatorPropagator(psi0.grid(), potential, plan.dt, constants)
      .evolve(psi0, plan.n_steps, plan.snapshot_stride);
}

}  // namespace pilotwave
