#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "pilotwave/bohm.hpp"
#include "pilotwave/operators.hpp"
#include "pilotwave/potential.hpp"
#include "pilotwave/rng.hpp"

namespace pilotwave {

/// Gaussian pointer wavefunction centered at y = 0.
class Pointer {
 public:
  Pointer(SpatialGrid grid, double sigma);

  const SpatialGrid& grid() const { return grid_; }
  double sigma() const { return sigma_; }
  const WaveFunction& state() const { return state_; }

 private:
  SpatialGrid grid_;
  double sigma_;
  WaveFunction state_;
};

/// System (x) times pointer (y) amplitudes, row-major n_sys x n_ptr.
class JointState {
 public:
  JointState(SpatialGrid sys_grid, SpatialGrid ptr_grid, std::vector<cplx> amplitudes,
             double time = 0.0);

  const SpatialGrid& sys_grid() const { return sys_; }
  const SpatialGrid& ptr_grid() const { return ptr_; }
  std::span<const cplx> amplitudes() const { return amplitudes_; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return amplitudes_[i * ptr_.size() + j]; }
  double time() const { return time_; }

  double norm_squared() const;
  /// Integrated over y: density in x. And the converse.
  std::vector<double> system_marginal() const;
  std::vector<double> pointer_marginal() const;
  /// Column j as a system wavefunction (not normalized).
  WaveFunction conditional_system_state(std::size_t j) const;

 private:
  SpatialGrid sys_;
  SpatialGrid ptr_;
  std::vector<cplx> amplitudes_;
  double time_;
};

JointState prepare_joint(const WaveFunction& psi, const Pointer& pointer);

/// exp(-i g O (x) P_ptr / hbar). Exact for position-diagonal parts (a pointer
/// shift by g O(x) per system cell) and for momentum-diagonal parts (a phase
/// in the joint momentum space). An operator with both parts is split
/// symmetrically, with local error O(g^3 [A,[A,B]]). Dense operators throw
/// UnsupportedOperator.
JointState impulsive_couple(const JointState& joint, const LinearOperator& op, double g,
                            const PhysicalConstants& constants);

struct PointerReading {
  double o;  // pointer position
  double f;  // system position
};

/// Which factor is read first. All three give the same joint distribution.
enum class SamplingOrder { Joint, SystemFirst, PointerFirst };

/// Born-rule sampler over the joint cell model: a cell (i, j) is chosen with
/// probability |Psi_ij|^2 dx dy, then x and y are uniform inside it.
class JointSampler {
 public:
  explicit JointSampler(const JointState& joint);

  PointerReading sample(RandomStream& stream, SamplingOrder order = SamplingOrder::Joint) const;
  /// Pointer column for a system position, drawn from |Psi(x_i, .)|^2.
  std::size_t sample_column(double x, RandomStream& stream) const;

 private:
  SpatialGrid sys_;
  SpatialGrid ptr_;
  std::vector<double> cdf_;         // flattened row-major joint cumulative
  std::vector<double> row_cdf_;     // system marginal cumulative
  std::vector<double> col_cdf_;     // pointer marginal cumulative
  std::vector<double> col_major_;   // per-column cumulative over rows, column-major
};

struct ProtocolConfig {
  double coupling_g = 0.0;
  std::size_t n_runs = 0;
  double f_bin_width = 0.0;
  std::uint64_t seed = 0;
  double density_floor = kDefaultDensityFloor;
  bool keep_pairs = false;

  /// g > 0, n_runs >= 1, bin width >= dx_sys; ValidationError otherwise.
  void validate(const SpatialGrid& sys_grid) const;
};

struct ProtocolBin {
  double center;
  std::size_t count;
  double estimate;          // mean(o)/g; NaN when empty
  double standard_error;    // NaN when count < 2
  double exact_value;       // |psi|^2-weighted bin average of the local expectation
  double expected_estimate; // E[o | f in bin]/g from the coupled joint density
  double mass;              // probability of the bin under |psi|^2
  bool central;             // mass >= half the largest bin mass

  double deviation() const { return estimate - exact_value; }
};

struct ProtocolOutcome {
  double coupling_g;
  double bin_width;
  std::size_t n_runs;
  std::vector<PointerReading> pairs;  // only with keep_pairs
  std::vector<ProtocolBin> bins;

  /// Bin with the largest mass.
  const ProtocolBin& peak_bin() const;
};

ProtocolOutcome run_protocol(const WaveFunction& psi, const LinearOperator& op,
                             const Pointer& pointer, const ProtocolConfig& config,
                             const PhysicalConstants& constants);

/// CSV `bin_center,count,estimate,stderr,exact_value,deviation` for bins
/// with at least one count.
void write_protocol_csv(const ProtocolOutcome& outcome, std::ostream& out);
/// CSV `run_id,o,f`.
void write_pairs_csv(const ProtocolOutcome& outcome, std::ostream& out);

struct BiasScanEntry {
  double g;
  double quadrature_bias;   // expected_estimate - exact_value at the peak bin
  double sampled_bias;      // estimate - exact_value at the peak bin
  double standard_error;
  double estimate;
  double exact_value;
};

struct BiasScanReport {
  std::vector<BiasScanEntry> entries;
  /// |bias(g_{n+1})| / |bias(g_n)| for consecutive entries.
  std::vector<double> quadrature_ratios() const;
};

/// g_values must be strictly decreasing (InvalidArgument otherwise).
BiasScanReport bias_scan(const WaveFunction& psi, const LinearOperator& op, const Pointer& pointer,
                         std::span<const double> g_values, const ProtocolConfig& base,
                         const PhysicalConstants& constants);

struct BackactionOptions {
  std::size_t n_trajectories = 64;
  std::size_t n_steps = 200;
  std::size_t snapshot_stride = 10;
  std::uint64_t seed = 0;
  /// Declared accuracy of the trajectory integrator; divergences are judged
  /// against it.
  double integrator_tolerance = 1e-6;
};

struct BackactionReport {
  double g;
  double horizon;
  double max_divergence;
  double mean_divergence;
  std::size_t frozen;
  double integrator_tolerance;
};

/// Bohmian trajectories of psi against trajectories guided, after the
/// coupling, by the joint wavefunction at the sampled pointer position. The
/// pointer has no dynamics of its own after the impulse, so each trajectory
/// follows its pointer column's conditional system wavefunction.
BackactionReport backaction_demo(const WaveFunction& psi, const LinearOperator& op,
                                 const Pointer& pointer, double g, double horizon,
                                 const Potential& potential, const PhysicalConstants& constants,
                                 const BackactionOptions& options = {});

}  // namespace pilotwave
