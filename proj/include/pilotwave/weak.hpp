#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "pilotwave/bohm.hpp"
#include "pilotwave/operators.hpp"
#include "pilotwave/report.hpp"

namespace pilotwave {

struct WeakValueResult {
  double value;         // Re(raw_complex)
  cplx raw_complex;     // <psi_f|Op|psi_i> / <psi_f|psi_i>
  double overlap_magnitude;
};

/// Pre/post-selected weak value. Throws VanishingOverlap when
/// |<psi_f|psi_i>| < 1e-10 and GridMismatch for different grids.
WeakValueResult weak_value(const LinearOperator& op, const WaveFunction& psi_i,
                           const WaveFunction& psi_f, const PhysicalConstants& constants);

/// Re(<x|S|psi> / <x|psi>) on the grid.
///
/// The position-diagonal part of S contributes its values directly, so a
/// pure multiplication operator (X in particular) is reproduced exactly,
/// masked points included. Any nonlocal part is divided by psi and is NaN
/// on the mask.
struct LocalExpectationField {
  SpatialGrid grid;
  std::vector<double> values;
  std::vector<std::uint8_t> node_mask;
  double time;
};

LocalExpectationField local_expectation(const LinearOperator& op, const WaveFunction& psi,
                                        const PhysicalConstants& constants,
                                        double floor = kDefaultDensityFloor);

struct EnsembleAverage {
  double value;          // sum over unmasked cells of S_B |psi|^2 dx
  double masked_mass;    // probability under the node mask
  double sup_abs_local;  // max |S_B| off the mask
  double leakage_bound() const { return masked_mass * sup_abs_local; }
};

EnsembleAverage ensemble_average(const LinearOperator& op, const WaveFunction& psi,
                                 const PhysicalConstants& constants,
                                 double floor = kDefaultDensityFloor);

struct TrajectoryAverage {
  double value;
  double standard_error;  // sample standard deviation / sqrt(n_used)
  std::size_t n_used;
  std::size_t n_skipped;  // trajectories next to masked grid points
};

/// (1/N) sum_j S_B(x_j) at psi_t's time, S_B interpolated linearly between
/// grid points. Throws TimeMismatch when psi_t is not a snapshot time.
TrajectoryAverage trajectory_ensemble_average(const LinearOperator& op,
                                              const TrajectoryEnsemble& ensemble,
                                              const WaveFunction& psi_t,
                                              const PhysicalConstants& constants,
                                              double floor = kDefaultDensityFloor);

struct SumRuleReport {
  double p;
  double q;
  double p_residual;  // ||P psi_i - p psi_i||
  double q_residual;  // ||Q psi_f - q psi_f||
  WeakValueResult p_weak;
  WeakValueResult q_weak;
  WeakValueResult sum_weak;
  double residual;    // |<P+Q>_w - (p + q)|
};

/// Verifies the eigen-conditions (Q is Hermitian, so Q^dagger = Q) and
/// throws PreconditionViolated when either residual exceeds the tolerance.
SumRuleReport sum_rule_check(const LinearOperator& p_op, const LinearOperator& q_op,
                             const WaveFunction& psi_i, const WaveFunction& psi_f, double p,
                             double q, const PhysicalConstants& constants,
                             double precondition_tolerance = 1e-6);

/// Plane wave k_index pre-selected, grid delta at the node nearest x_o
/// post-selected.
struct CounterexampleReport {
  long k_index;
  double x_o;
  double x_node;  // grid point carrying the post-selection
  double expected_velocity;
  WeakValueResult velocity;
  WeakValueResult position;
  WeakValueResult sum;
  double velocity_deviation;
  double position_deviation;  // against x_o
  double sum_deviation;
};

CounterexampleReport counterexample_v_plus_x(long k_index, double x_o, const SpatialGrid& grid,
                                             const PhysicalConstants& constants);

std::vector<ReportEntry> report_entries(const CounterexampleReport& report, double tolerance);
std::vector<ReportEntry> report_entries(const SumRuleReport& report, const std::string& label,
                                        double precondition_tolerance, double tolerance);

}  // namespace pilotwave
