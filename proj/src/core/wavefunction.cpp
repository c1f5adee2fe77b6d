#include "pilotwave/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "pilotwave/errors.hpp"

namespace pilotwave {

WaveFunction::WaveFunction(SpatialGrid grid, Amplitudes amplitudes, double time)
    : grid_(std::move(grid)), amplitudes_(std::move(amplitudes)), time_(time) {
  if (amplitudes_.size() != grid_.size()) {
    throw GridMismatch("wavefunction has " + std::to_string(amplitudes_.size()) +
                       " amplitudes for a grid of " + std::to_string(grid_.size()));
  }
}

double WaveFunction::norm_squared() const {
  double sum = 0.0;
  for (const auto& a : amplitudes_) sum += std::norm(a);
  return sum * grid_.dx();
}

std::vector<double> WaveFunction::density() const {
  std::vector<double> rho(amplitudes_.size());
  std::transform(amplitudes_.begin(), amplitudes_.end(), rho.begin(),
                 [](const cplx& a) { return std::norm(a); });
  return rho;
}

WaveFunction normalize(const WaveFunction& psi) {
  const double n2 = psi.norm_squared();
  if (!(n2 >= 1e-300) || !std::isfinite(n2)) throw ZeroNorm();
  const double scale = 1.0 / std::sqrt(n2);
  WaveFunction::Amplitudes out(psi.amplitudes().begin(), psi.amplitudes().end());
  for (auto& a : out) a *= scale;
  return WaveFunction(psi.grid(), std::move(out), psi.time());
}

cplx inner_product(const WaveFunction& phi, const WaveFunction& psi) {
  require_same_grid(phi.grid(), psi.grid(), "inner_product");
  cplx sum(0.0, 0.0);
  for (std::size_t i = 0; i < phi.size(); ++i) sum += std::conj(phi[i]) * psi[i];
  return sum * phi.grid().dx();
}

std::vector<std::uint8_t> node_mask(const WaveFunction& psi, double floor) {
  if (!(floor > 0.0 && floor <= 1e-3)) {
    throw InvalidArgument("density floor must lie in (0, 1e-3]");
  }
  const auto rho = psi.density();
  const double threshold = floor * *std::max_element(rho.begin(), rho.end());
  std::vector<std::uint8_t> mask(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) mask[i] = rho[i] < threshold ? 1 : 0;
  return mask;
}

}  // namespace pilotwave
