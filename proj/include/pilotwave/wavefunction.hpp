#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "pilotwave/grid.hpp"
#include "pilotwave/spectral.hpp"

namespace pilotwave {

/// Complex amplitudes psi(x_i, t) on a SpatialGrid. Immutable; the norm is
/// sum |psi_i|^2 dx.
class WaveFunction {
 public:
  using Amplitudes = std::vector<cplx>;

  WaveFunction(SpatialGrid grid, Amplitudes amplitudes, double time = 0.0);

  const SpatialGrid& grid() const { return grid_; }
  std::span<const cplx> amplitudes() const { return amplitudes_; }
  const cplx& operator[](std::size_t i) const { return amplitudes_[i]; }
  std::size_t size() const { return amplitudes_.size(); }
  double time() const { return time_; }

  double norm_squared() const;

  /// |psi|^2 at each grid point.
  std::vector<double> density() const;

  WaveFunction at_time(double t) const { return WaveFunction(grid_, amplitudes_, t); }

 private:
  SpatialGrid grid_;
  Amplitudes amplitudes_;
  double time_;
};

/// Rescales to unit norm. Phase is untouched. Throws ZeroNorm below 1e-300.
WaveFunction normalize(const WaveFunction& psi);

/// <phi|psi> = sum conj(phi_i) psi_i dx. Throws GridMismatch.
cplx inner_product(const WaveFunction& phi, const WaveFunction& psi);

/// Relative density threshold used by node masks throughout the library.
inline constexpr double kDefaultDensityFloor = 1e-8;

/// True where |psi|^2 < floor * max|psi|^2. Throws InvalidArgument unless
/// floor lies in (0, 1e-3].
std::vector<std::uint8_t> node_mask(const WaveFunction& psi, double floor);

}  // namespace pilotwave
