#include "pilotwave/states.hpp"

#include <cmath>
#include <numbers>

#include "pilotwave/errors.hpp"

namespace pilotwave {

WaveFunction gaussian_packet(const SpatialGrid& grid, double center, double sigma, double k0) {
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian sigma must be > 0");
  WaveFunction::Amplitudes a(grid.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = grid.x(i);
    const double d = x - center;
    a[i] = std::exp(cplx(-d * d / (4.0 * sigma * sigma), k0 * x));
  }
  return normalize(WaveFunction(grid, std::move(a)));
}

WaveFunction plane_wave(const SpatialGrid& grid, long k_index) {
  const double k = grid.wavenumber_of(k_index);
  const double amp = 1.0 / std::sqrt(grid.length());
  WaveFunction::Amplitudes a(grid.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::polar(amp, k * grid.x(i));
  return WaveFunction(grid, std::move(a));
}

WaveFunction harmonic_ground_state(const SpatialGrid& grid, double omega, double center,
                                   const PhysicalConstants& constants) {
  constants.validate();
  if (!(omega > 0.0)) throw InvalidArgument("omega must be > 0");
  const double alpha = constants.mass * omega / constants.hbar;
  const double amp = std::pow(alpha / std::numbers::pi, 0.25);
  WaveFunction::Amplitudes a(grid.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = grid.x(i) - center;
    a[i] = amp * std::exp(-0.5 * alpha * d * d);
  }
  return WaveFunction(grid, std::move(a));
}

WaveFunction grid_delta(const SpatialGrid& grid, double x_o) {
  WaveFunction::Amplitudes a(grid.size(), cplx(0.0, 0.0));
  a[grid.nearest_index(x_o)] = 1.0 / std::sqrt(grid.dx());
  return WaveFunction(grid, std::move(a));
}

WaveFunction superpose(cplx a, const WaveFunction& phi, cplx b, const WaveFunction& psi) {
  require_same_grid(phi.grid(), psi.grid(), "superpose");
  WaveFunction::Amplitudes out(phi.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * phi[i] + b * psi[i];
  return normalize(WaveFunction(phi.grid(), std::move(out), phi.time()));
}

}  // namespace pilotwave
