#pragma once

#include "pilotwave/wavefunction.hpp"

namespace pilotwave {

// Normalized initial states used across the library.

/// psi ∝ exp(-(x - center)^2 / (4 sigma^2) + i k0 x); sigma is the standard
/// deviation of |psi|^2.
WaveFunction gaussian_packet(const SpatialGrid& grid, double center, double sigma, double k0);

/// exp(i k x)/sqrt(L) with k = 2 pi k_index / L.
WaveFunction plane_wave(const SpatialGrid& grid, long k_index);

/// Harmonic-oscillator ground state (m omega / pi hbar)^{1/4} exp(-m omega (x-c)^2 / 2 hbar).
WaveFunction harmonic_ground_state(const SpatialGrid& grid, double omega, double center,
                                   const PhysicalConstants& constants);

/// Single hot cell at the grid point nearest x_o: the grid realization of |x_o>.
WaveFunction grid_delta(const SpatialGrid& grid, double x_o);

/// normalize(a*phi + b*psi).
WaveFunction superpose(cplx a, const WaveFunction& phi, cplx b, const WaveFunction& psi);

}  // namespace pilotwave
