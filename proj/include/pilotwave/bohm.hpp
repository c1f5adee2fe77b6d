#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <vector>

#include "pilotwave/potential.hpp"
#include "pilotwave/wavefunction.hpp"

namespace pilotwave {

/// J = (hbar/m) Im(psi* dpsi/dx), spectral derivative. A plane wave e^{+ikx}
/// carries positive flux for k > 0.
std::vector<double> current_density(const WaveFunction& psi, const PhysicalConstants& constants);

/// Guiding-equation velocity v = J/|psi|^2. Masked points hold NaN.
struct VelocityField {
  SpatialGrid grid;
  std::vector<double> values;
  std::vector<std::uint8_t> node_mask;
  double time;
};

VelocityField velocity_field(const WaveFunction& psi, const PhysicalConstants& constants,
                             double floor = kDefaultDensityFloor);

/// n i.i.d. positions from |psi|^2 by inverse CDF over the cell model.
/// Sample j draws from RandomStream(seed, j).
std::vector<double> sample_quantum_equilibrium(const WaveFunction& psi, std::size_t n,
                                               std::uint64_t seed);

struct NodeEncounter {
  std::size_t trajectory;
  double time;
};

/// Positions x^j(t_k) at the snapshot times. Storage is unwrapped (continuous
/// in time); position() returns the value wrapped into the box.
class TrajectoryEnsemble {
 public:
  TrajectoryEnsemble(SpatialGrid grid, std::vector<double> times, std::size_t n_trajectories,
                     std::uint64_t seed);

  const SpatialGrid& grid() const { return grid_; }
  std::span<const double> times() const { return times_; }
  std::size_t size() const { return n_; }
  std::uint64_t seed() const { return seed_; }

  double position(std::size_t j, std::size_t k) const { return grid_.wrap(unwrapped(j, k)); }
  double unwrapped(std::size_t j, std::size_t k) const { return positions_[j * times_.size() + k]; }
  std::vector<double> positions_at(std::size_t k) const;

  /// Frozen trajectories stop at their last valid position.
  bool frozen(std::size_t j) const { return freeze_time_[j] <= times_.back(); }
  bool frozen_at(std::size_t j, std::size_t k) const { return freeze_time_[j] <= times_[k]; }
  std::size_t frozen_count() const;
  const std::vector<NodeEncounter>& node_encounters() const { return encounters_; }

  /// Index of the snapshot time within a relative 1e-9 of t, or TimeMismatch.
  std::size_t time_index(double t) const;

  // mutation during integration
  void set(std::size_t j, std::size_t k, double x) { positions_[j * times_.size() + k] = x; }
  void freeze(std::size_t j, double t);

 private:
  SpatialGrid grid_;
  std::vector<double> times_;
  std::size_t n_;
  std::uint64_t seed_;
  std::vector<double> positions_;
  std::vector<double> freeze_time_;
  std::vector<NodeEncounter> encounters_;
};

struct TrajectoryOptions {
  double density_floor = kDefaultDensityFloor;
  /// Substep bound h * |dv/dx| <= lipschitz_fraction near live trajectories;
  /// keeps each RK4 step an increasing map so trajectories cannot cross.
  double lipschitz_fraction = 0.5;
  /// Substep bound h * |v| <= cfl_fraction * dx.
  double cfl_fraction = 0.5;
  /// A trajectory whose local bound forces h below this fraction of the
  /// snapshot spacing is frozen and reported as a node encounter.
  double min_step_fraction = 1e-5;
  std::uint64_t seed = 0;
};

/// Integrates dx/dt = v(x, t) with classical RK4; v is interpolated linearly
/// in x within grid cells and linearly in t between snapshots.
TrajectoryEnsemble integrate_trajectories(std::span<const double> x0s,
                                          std::span<const WaveFunction> snapshots,
                                          const PhysicalConstants& constants,
                                          const TrajectoryOptions& options = {});

/// Number of adjacent pairs (ordered at t0, among never-frozen trajectories)
/// whose order is violated at some later snapshot.
std::size_t count_crossings(const TrajectoryEnsemble& ensemble);

/// Total-variation distance 1/2 sum |hist_b - p_b| between the ensemble at
/// psi_t's time and |psi_t|^2, over n_bins equal bins. Throws TimeMismatch.
double equivariance_distance(const TrajectoryEnsemble& ensemble, const WaveFunction& psi_t,
                             std::size_t n_bins);

/// Kinetic, classical and quantum parts of the particle energy. Masked
/// points hold NaN.
struct BohmianEnergyField {
  SpatialGrid grid;
  std::vector<double> kinetic;
  std::vector<double> classical;
  std::vector<double> quantum;
  std::vector<std::uint8_t> node_mask;

  std::vector<double> total() const;
};

/// Q = -(hbar^2/2m) R''/R with R = |psi|; R''/R is taken from the spectral
/// psi'' and the phase gradient.
BohmianEnergyField bohmian_energy(const WaveFunction& psi, const Potential& potential,
                                  const PhysicalConstants& constants,
                                  double floor = kDefaultDensityFloor);

/// CSV `traj_id,t,x,frozen_flag`, sorted by traj_id then t.
void write_trajectories_csv(const TrajectoryEnsemble& ensemble, std::ostream& out);

}  // namespace pilotwave
