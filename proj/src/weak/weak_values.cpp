#include <algorithm>
#include <cmath>
#include <limits>

#include "pilotwave/errors.hpp"
#include "pilotwave/spectral.hpp"
#include "pilotwave/states.hpp"
#include "pilotwave/weak.hpp"

namespace pilotwave {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kOverlapFloor = 1e-10;

double distance(const WaveFunction& a, const WaveFunction& b, cplx scale) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - scale * b[i]);
  return std::sqrt(s * a.grid().dx());
}

}  // namespace

WeakValueResult weak_value(const LinearOperator& op, const WaveFunction& psi_i,
                           const WaveFunction& psi_f, const PhysicalConstants& constants) {
  require_same_grid(psi_i.grid(), psi_f.grid(), "weak_value");
  const cplx overlap = inner_product(psi_f, psi_i);
  if (std::abs(overlap) < kOverlapFloor) throw VanishingOverlap(std::abs(overlap));
  const cplx ratio = inner_product(psi_f, apply(op, psi_i, constants)) / overlap;
  return {ratio.real(), ratio, std::abs(overlap)};
}

LocalExpectationField local_expectation(const LinearOperator& op, const WaveFunction& psi,
                                        const PhysicalConstants& constants, double floor) {
  const auto& grid = psi.grid();
  auto mask = node_mask(psi, floor);
  const auto parts = decompose(op, grid, constants);

  std::vector<double> values(psi.size(), 0.0);
  if (parts.has_position_part()) values = parts.position_diagonal;

  if (parts.has_momentum_part() || parts.has_dense_part()) {
    std::vector<cplx> nonlocal(psi.size(), cplx(0.0, 0.0));
    if (parts.has_momentum_part()) nonlocal = spectral::apply_symbol(psi.amplitudes(), parts.momentum_symbol);
    for (const auto& [factor, m] : parts.dense_terms) {
      for (std::size_t r = 0; r < m.n; ++r) {
        cplx acc(0.0, 0.0);
        for (std::size_t c = 0; c < m.n; ++c) acc += m(r, c) * psi[c];
        nonlocal[r] += factor * acc;
      }
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = mask[i] ? kNaN : values[i] + (nonlocal[i] / psi[i]).real();
    }
  }
  return {grid, std::move(values), std::move(mask), psi.time()};
}

EnsembleAverage ensemble_average(const LinearOperator& op, const WaveFunction& psi,
                                 const PhysicalConstants& constants, double floor) {
  const auto field = local_expectation(op, psi, constants, floor);
  const double dx = psi.grid().dx();
  double value = 0.0, masked = 0.0, sup = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double rho = std::norm(psi[i]) * dx;
    if (field.node_mask[i]) {
      masked += rho;
      continue;
    }
    value += field.values[i] * rho;
    sup = std::max(sup, std::abs(field.values[i]));
  }
  return {value, masked, sup};
}

TrajectoryAverage trajectory_ensemble_average(const LinearOperator& op,
                                              const TrajectoryEnsemble& ensemble,
                                              const WaveFunction& psi_t,
                                              const PhysicalConstants& constants, double floor) {
  require_same_grid(ensemble.grid(), psi_t.grid(), "trajectory_ensemble_average");
  const std::size_t k = ensemble.time_index(psi_t.time());
  const auto field = local_expectation(op, psi_t, constants, floor);
  const auto& grid = psi_t.grid();

  double sum = 0.0, sum_sq = 0.0;
  std::size_t used = 0, skipped = 0;
  for (std::size_t j = 0; j < ensemble.size(); ++j) {
    const double s = (ensemble.position(j, k) - grid.x_min()) / grid.dx();
    const double fl = std::floor(s);
    const std::size_t i0 = static_cast<std::size_t>(fl) % grid.size();
    const std::size_t i1 = (i0 + 1) % grid.size();
    const double f = s - fl;
    const double a = field.values[i0], b = field.values[i1];
    if (!std::isfinite(a) || !std::isfinite(b)) {
      ++skipped;
      continue;
    }
    const double v = (1.0 - f) * a + f * b;
    sum += v;
    sum_sq += v * v;
    ++used;
  }
  if (used == 0) return {kNaN, kNaN, 0, skipped};
  const double mean = sum / static_cast<double>(used);
  double se = kNaN;
  if (used > 1) {
    const double var = std::max(0.0, (sum_sq - sum * mean) / static_cast<double>(used - 1));
    se = std::sqrt(var / static_cast<double>(used));
  }
  return {mean, se, used, skipped};
}

SumRuleReport sum_rule_check(const LinearOperator& p_op, const LinearOperator& q_op,
                             const WaveFunction& psi_i, const WaveFunction& psi_f, double p,
                             double q, const PhysicalConstants& constants,
                             double precondition_tolerance) {
  require_same_grid(psi_i.grid(), psi_f.grid(), "sum_rule_check");
  const double p_res = distance(apply(p_op, psi_i, constants), psi_i, p);
  if (!(p_res < precondition_tolerance)) {
    throw PreconditionViolated("||P psi_i - p psi_i||", p_res);
  }
  const double q_res = distance(apply(q_op, psi_f, constants), psi_f, q);
  if (!(q_res < precondition_tolerance)) {
    throw PreconditionViolated("||Q psi_f - q psi_f||", q_res);
  }
  SumRuleReport r{p, q, p_res, q_res, weak_value(p_op, psi_i, psi_f, constants),
                  weak_value(q_op, psi_i, psi_f, constants),
                  weak_value(p_op + q_op, psi_i, psi_f, constants), 0.0};
  r.residual = std::abs(r.sum_weak.value - (p + q));
  return r;
}

CounterexampleReport counterexample_v_plus_x(long k_index, double x_o, const SpatialGrid& grid,
                                             const PhysicalConstants& constants) {
  constants.validate();
  const auto psi_i = plane_wave(grid, k_index);
  const auto psi_f = grid_delta(grid, x_o);
  const double x_node = grid.x(grid.nearest_index(x_o));
  const double v = constants.hbar * grid.wavenumber_of(k_index) / constants.mass;

  CounterexampleReport r{k_index, x_o, x_node, v,
                         weak_value(LinearOperator::velocity(), psi_i, psi_f, constants),
                         weak_value(LinearOperator::position(), psi_i, psi_f, constants),
                         weak_value(LinearOperator::velocity() + LinearOperator::position(), psi_i,
                                    psi_f, constants),
                         0.0, 0.0, 0.0};
  r.velocity_deviation = std::abs(r.velocity.value - v);
  r.position_deviation = std::abs(r.position.value - x_o);
  r.sum_deviation = std::abs(r.sum.value - (v + x_o));
  return r;
}

}  // namespace pilotwave
