#include "pilotwave/verification/oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace pilotwave::oracles {

double free_gaussian_width(double sigma0, double t, const PhysicalConstants& c) {
  const double tau = c.hbar * t / (2.0 * c.mass * sigma0 * sigma0);
  return sigma0 * std::sqrt(1.0 + tau * tau);
}

double free_gaussian_center(double x0, double k0, double t, const PhysicalConstants& c) {
  return x0 + c.hbar * k0 * t / c.mass;
}

WaveFunction free_gaussian_state(const SpatialGrid& grid, double x0, double sigma0, double k0,
                                 double t, const PhysicalConstants& c) {
  const double tau = c.hbar * t / (2.0 * c.mass * sigma0 * sigma0);
  const cplx spread(1.0, tau);
  const cplx prefactor = std::pow(2.0 * std::numbers::pi * sigma0 * sigma0, -0.25) / std::sqrt(spread);
  const double v = c.hbar * k0 / c.mass;
  const double omega0 = c.hbar * k0 * k0 / (2.0 * c.mass);
  WaveFunction::Amplitudes a(grid.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = grid.x(i);
    const double d = x - x0 - v * t;
    const cplx envelope = std::exp(-d * d / (4.0 * sigma0 * sigma0 * spread));
    a[i] = prefactor * envelope * std::polar(1.0, k0 * x - omega0 * t);
  }
  return WaveFunction(grid, std::move(a), t);
}

double free_gaussian_trajectory(double x_start, double x0, double sigma0, double k0, double t,
                                const PhysicalConstants& c) {
  const double center = free_gaussian_center(x0, k0, t, c);
  return center + (x_start - x0) * free_gaussian_width(sigma0, t, c) / sigma0;
}

WaveFunction coherent_state(const SpatialGrid& grid, double omega, double x0, double t,
                            const PhysicalConstants& c) {
  const double alpha = c.mass * omega / c.hbar;
  const double xc = x0 * std::cos(omega * t);
  const double pc = -c.mass * omega * x0 * std::sin(omega * t);
  const double amp = std::pow(alpha / std::numbers::pi, 0.25);
  WaveFunction::Amplitudes a(grid.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = grid.x(i) - xc;
    a[i] = amp * std::exp(cplx(-0.5 * alpha * d * d, pc * grid.x(i) / c.hbar));
  }
  return WaveFunction(grid, std::move(a), t);
}

double phase_aligned_distance(const WaveFunction& psi, const WaveFunction& reference) {
  cplx overlap(0.0, 0.0);
  for (std::size_t i = 0; i < psi.size(); ++i) overlap += std::conj(reference[i]) * psi[i];
  const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx(1.0, 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) sum += std::norm(psi[i] - phase * reference[i]);
  return std::sqrt(sum * psi.grid().dx());
}

namespace {

WaveFunction random_unit_state(const SpatialGrid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  WaveFunction::Amplitudes a(grid.size());
  double s = 0.0;
  for (auto& v : a) {
    v = cplx(n(rng), n(rng));
    s += std::norm(v);
  }
  const double scale = 1.0 / std::sqrt(s * grid.dx());
  for (auto& v : a) v *= scale;
  return WaveFunction(grid, std::move(a));
}

// eigenvalue * |u><u| + (1 - |u><u|) H (1 - |u><u|) for a unit-norm u.
DenseMatrix with_eigenvector(const WaveFunction& u, double eigenvalue, std::mt19937_64& rng) {
  const std::size_t n = u.size();
  const double dx = u.grid().dx();
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cplx> h(n * n), proj(n * n), comp(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    h[r * n + r] = g(rng);
    for (std::size_t c = r + 1; c < n; ++c) {
      h[r * n + c] = cplx(g(rng), g(rng));
      h[c * n + r] = std::conj(h[r * n + c]);
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      proj[r * n + c] = u[r] * std::conj(u[c]) * dx;
      comp[r * n + c] = (r == c ? 1.0 : 0.0) - proj[r * n + c];
    }
  }
  auto mul = [n](const std::vector<cplx>& a, const std::vector<cplx>& b) {
    std::vector<cplx> out(n * n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t k = 0; k < n; ++k) out[r * n + c] += a[r * n + k] * b[k * n + c];
    return out;
  };
  const auto sandwich = mul(mul(comp, h), comp);
  DenseMatrix m{n, std::vector<cplx>(n * n)};
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      m.entries[r * n + c] = eigenvalue * proj[r * n + c] + sandwich[r * n + c];
    }
  }
  // symmetrize away rounding so the matrix is Hermitian to the last bit
  for (std::size_t r = 0; r < n; ++r) {
    m.entries[r * n + r] = m.entries[r * n + r].real();
    for (std::size_t c = r + 1; c < n; ++c) {
      const cplx avg = 0.5 * (m.entries[r * n + c] + std::conj(m.entries[c * n + r]));
      m.entries[r * n + c] = avg;
      m.entries[c * n + r] = std::conj(avg);
    }
  }
  return m;
}

}  // namespace

SumRuleInstance random_sum_rule_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const SpatialGrid grid(0.0, 1.0, 4);
  std::uniform_real_distribution<double> eig(-3.0, 3.0);
  for (;;) {
    auto psi_i = random_unit_state(grid, rng);
    auto psi_f = random_unit_state(grid, rng);
    cplx overlap(0.0, 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) overlap += std::conj(psi_f[i]) * psi_i[i] * grid.dx();
    if (std::abs(overlap) < 0.1) continue;
    const double p = eig(rng), q = eig(rng);
    auto pm = with_eigenvector(psi_i, p, rng);
    auto qm = with_eigenvector(psi_f, q, rng);
    return {grid, std::move(pm), std::move(qm), std::move(psi_i), std::move(psi_f), p, q};
  }
}

cplx brute_force_weak_value(const DenseMatrix& m, const WaveFunction& psi_i,
                            const WaveFunction& psi_f) {
  cplx num(0.0, 0.0), den(0.0, 0.0);
  for (std::size_t r = 0; r < m.n; ++r) {
    cplx row(0.0, 0.0);
    for (std::size_t c = 0; c < m.n; ++c) row += m(r, c) * psi_i[c];
    num += std::conj(psi_f[r]) * row;
    den += std::conj(psi_f[r]) * psi_i[r];
  }
  return num / den;
}

}  // namespace pilotwave::oracles
