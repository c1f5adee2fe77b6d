#include <algorithm>
#include <cmath>

#include "pilotwave/errors.hpp"
#include "pilotwave/measurement.hpp"
#include "pilotwave/spectral.hpp"

namespace pilotwave {

namespace {

// Index of the cell holding `target` in the cumulative range [first, last)
// whose running total starts at `base`, and the fraction of the way through
// that cell's mass.
std::size_t locate(const double* first, const double* last, double base, double target,
                   double& frac) {
  const double* it = std::upper_bound(first, last, target);
  if (it == last) {
    // rounding pushed the target onto the total: last occupied cell
    it = last - 1;
    while (it > first && *it == *(it - 1)) --it;
  }
  const double below = it == first ? base : *(it - 1);
  const double mass = *it - below;
  frac = mass > 0.0 ? std::clamp((target - below) / mass, 0.0, 1.0) : 0.5;
  return static_cast<std::size_t>(it - first);
}

double jitter(const SpatialGrid& grid, std::size_t i, double frac) {
  return grid.wrap(grid.x(i) + (frac - 0.5) * grid.dx());
}

}  // namespace

Pointer::Pointer(SpatialGrid grid, double sigma)
    : grid_(std::move(grid)),
      sigma_(sigma),
      state_(grid_, WaveFunction::Amplitudes(grid_.size(), cplx(1.0, 0.0))) {
  if (!(sigma > 0.0 && std::isfinite(sigma))) throw InvalidArgument("pointer sigma must be > 0");
  if (!(grid_.x_min() < 0.0 && grid_.x_max() > 0.0)) {
    throw InvalidArgument("pointer grid must contain y = 0");
  }
  WaveFunction::Amplitudes a(grid_.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double y = grid_.x(j);
    a[j] = std::exp(-y * y / (4.0 * sigma * sigma));
  }
  state_ = normalize(WaveFunction(grid_, std::move(a)));
}

JointState::JointState(SpatialGrid sys_grid, SpatialGrid ptr_grid, std::vector<cplx> amplitudes,
                       double time)
    : sys_(std::move(sys_grid)), ptr_(std::move(ptr_grid)), amplitudes_(std::move(amplitudes)),
      time_(time) {
  if (amplitudes_.size() != sys_.size() * ptr_.size()) {
    throw InvalidArgument("joint amplitudes must have n_sys * n_ptr entries");
  }
}

double JointState::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return s * sys_.dx() * ptr_.dx();
}

std::vector<double> JointState::system_marginal() const {
  std::vector<double> m(sys_.size(), 0.0);
  for (std::size_t i = 0; i < sys_.size(); ++i) {
    for (std::size_t j = 0; j < ptr_.size(); ++j) m[i] += std::norm((*this)(i, j));
    m[i] *= ptr_.dx();
  }
  return m;
}

std::vector<double> JointState::pointer_marginal() const {
  std::vector<double> m(ptr_.size(), 0.0);
  for (std::size_t i = 0; i < sys_.size(); ++i) {
    for (std::size_t j = 0; j < ptr_.size(); ++j) m[j] += std::norm((*this)(i, j));
  }
  for (auto& v : m) v *= sys_.dx();
  return m;
}

WaveFunction JointState::conditional_system_state(std::size_t j) const {
  WaveFunction::Amplitudes a(sys_.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = (*this)(i, j);
  return WaveFunction(sys_, std::move(a), time_);
}

JointState prepare_joint(const WaveFunction& psi, const Pointer& pointer) {
  const auto& phi = pointer.state();
  std::vector<cplx> a(psi.size() * phi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    for (std::size_t j = 0; j < phi.size(); ++j) a[i * phi.size() + j] = psi[i] * phi[j];
  }
  return JointState(psi.grid(), pointer.grid(), std::move(a), psi.time());
}

JointState impulsive_couple(const JointState& joint, const LinearOperator& op, double g,
                            const PhysicalConstants& constants) {
  if (!std::isfinite(g)) throw InvalidArgument("coupling g must be finite");
  const auto parts = decompose(op, joint.sys_grid(), constants);
  if (parts.has_dense_part()) {
    throw UnsupportedOperator("impulsive coupling has no splitting for dense operator " + op.label());
  }
  if (g == 0.0) return joint;

  const std::size_t ns = joint.sys_grid().size(), np = joint.ptr_grid().size();
  const auto& kappa = joint.ptr_grid().wavenumbers();
  std::vector<cplx> a(joint.amplitudes().begin(), joint.amplitudes().end());

  // pointer shift by fraction * g * D(x_i) in every system row
  auto shift = [&](double fraction) {
    auto rows = spectral::forward_rows(a, ns, np);
    for (std::size_t i = 0; i < ns; ++i) {
      const double s = fraction * g * parts.position_diagonal[i];
      for (std::size_t j = 0; j < np; ++j) rows[i * np + j] *= std::polar(1.0, -s * kappa[j]);
    }
    a = spectral::inverse_rows(rows, ns, np);
  };
  auto boost = [&]() {
    auto full = spectral::forward_2d(a, ns, np);
    for (std::size_t i = 0; i < ns; ++i) {
      const double s = g * parts.momentum_symbol[i];
      for (std::size_t j = 0; j < np; ++j) full[i * np + j] *= std::polar(1.0, -s * kappa[j]);
    }
    a = spectral::inverse_2d(full, ns, np);
  };

  if (parts.has_position_part() && parts.has_momentum_part()) {
    shift(0.5);
    boost();
    shift(0.5);
  } else if (parts.has_position_part()) {
    shift(1.0);
  } else if (parts.has_momentum_part()) {
    boost();
  }
  return JointState(joint.sys_grid(), joint.ptr_grid(), std::move(a), joint.time());
}

JointSampler::JointSampler(const JointState& joint)
    : sys_(joint.sys_grid()), ptr_(joint.ptr_grid()) {
  const std::size_t ns = sys_.size(), np = ptr_.size();
  cdf_.resize(ns * np);
  row_cdf_.resize(ns);
  col_cdf_.assign(np, 0.0);
  col_major_.resize(ns * np);
  double acc = 0.0;
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      const double p = std::norm(joint(i, j));
      acc += p;
      cdf_[i * np + j] = acc;
      col_cdf_[j] += p;
    }
    row_cdf_[i] = acc;
  }
  if (!(acc > 0.0)) throw ZeroNorm();
  for (std::size_t j = 1; j < np; ++j) col_cdf_[j] += col_cdf_[j - 1];
  for (std::size_t j = 0; j < np; ++j) {
    double c = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
      c += std::norm(joint(i, j));
      col_major_[j * ns + i] = c;
    }
  }
}

PointerReading JointSampler::sample(RandomStream& stream, SamplingOrder order) const {
  const std::size_t ns = sys_.size(), np = ptr_.size();
  const double u1 = stream.uniform(), u2 = stream.uniform();
  double fx = 0.0, fy = 0.0;
  std::size_t i = 0, j = 0;
  switch (order) {
    case SamplingOrder::Joint: {
      const std::size_t cell = locate(cdf_.data(), cdf_.data() + cdf_.size(), 0.0, u1 * cdf_.back(), fx);
      i = cell / np;
      j = cell % np;
      fy = u2;
      break;
    }
    case SamplingOrder::SystemFirst: {
      i = locate(row_cdf_.data(), row_cdf_.data() + ns, 0.0, u1 * row_cdf_.back(), fx);
      const double base = i == 0 ? 0.0 : cdf_[i * np - 1];
      const double* row = cdf_.data() + i * np;
      j = locate(row, row + np, base, base + u2 * (row[np - 1] - base), fy);
      break;
    }
    case SamplingOrder::PointerFirst: {
      j = locate(col_cdf_.data(), col_cdf_.data() + np, 0.0, u1 * col_cdf_.back(), fy);
      const double* col = col_major_.data() + j * ns;
      i = locate(col, col + ns, 0.0, u2 * col[ns - 1], fx);
      break;
    }
  }
  return {jitter(ptr_, j, fy), jitter(sys_, i, fx)};
}

std::size_t JointSampler::sample_column(double x, RandomStream& stream) const {
  const std::size_t np = ptr_.size();
  const std::size_t i = sys_.nearest_index(x);
  const double base = i == 0 ? 0.0 : cdf_[i * np - 1];
  const double* row = cdf_.data() + i * np;
  if (!(row[np - 1] > base)) throw ZeroNorm();
  double frac;
  return locate(row, row + np, base, base + stream.uniform() * (row[np - 1] - base), frac);
}

}  // namespace pilotwave
