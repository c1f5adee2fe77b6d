#pragma once

#include <cstdint>

#include "pilotwave/operators.hpp"
#include "pilotwave/wavefunction.hpp"

// Closed-form solutions used as independent references. Nothing here calls the
// propagator, the operator machinery or the trajectory integrator.

namespace pilotwave::oracles {

/// Standard deviation of |psi|^2 for a free Gaussian: sigma0 sqrt(1 + (hbar t / 2 m sigma0^2)^2).
double free_gaussian_width(double sigma0, double t, const PhysicalConstants& c);

/// Center of a free Gaussian: x0 + hbar k0 t / m.
double free_gaussian_center(double x0, double k0, double t, const PhysicalConstants& c);

/// Exact free evolution of gaussian_packet(grid, x0, sigma0, k0) evaluated on the grid.
WaveFunction free_gaussian_state(const SpatialGrid& grid, double x0, double sigma0, double k0,
                                 double t, const PhysicalConstants& c);

/// Bohmian trajectory of the free Gaussian through x_start at t = 0
/// (the flow is an affine scaling about the moving center).
double free_gaussian_trajectory(double x_start, double x0, double sigma0, double k0, double t,
                                const PhysicalConstants& c);

/// Harmonic coherent state displaced to x0 at rest at t = 0; exact up to a
/// global phase. Center follows x0 cos(omega t).
WaveFunction coherent_state(const SpatialGrid& grid, double omega, double x0, double t,
                            const PhysicalConstants& c);

/// min over theta of ||psi - e^{i theta} reference||, computed from the
/// difference directly.
double phase_aligned_distance(const WaveFunction& psi, const WaveFunction& reference);

/// Random 4-cell instance of P psi_i = p psi_i, Q psi_f = q psi_f with P, Q
/// Hermitian: P = p |i><i| + (1 - |i><i|) H (1 - |i><i|), H random, and the
/// same for Q with psi_f. |<psi_f|psi_i>| >= 0.1.
struct SumRuleInstance {
  SpatialGrid grid;
  DenseMatrix p_matrix;
  DenseMatrix q_matrix;
  WaveFunction psi_i;
  WaveFunction psi_f;
  double p;
  double q;
};

SumRuleInstance random_sum_rule_instance(std::uint64_t seed);

/// sum conj(f) M i / sum conj(f) i by explicit loops (dx cancels).
cplx brute_force_weak_value(const DenseMatrix& m, const WaveFunction& psi_i,
                            const WaveFunction& psi_f);

}  // namespace pilotwave::oracles
