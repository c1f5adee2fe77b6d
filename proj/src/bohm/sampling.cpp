#include <algorithm>

#include "pilotwave/bohm.hpp"
#include "pilotwave/errors.hpp"
#include "pilotwave/rng.hpp"

namespace pilotwave {

std::vector<double> sample_quantum_equilibrium(const WaveFunction& psi, std::size_t n,
                                               std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("sample count must be >= 1");
  const auto& grid = psi.grid();
  const auto rho = psi.density();

  // cumulative cell masses; cell i spans [x_i - dx/2, x_i + dx/2)
  std::vector<double> cdf(rho.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    acc += rho[i];
    cdf[i] = acc;
  }
  if (!(acc > 0.0)) throw ZeroNorm();

  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) {
    RandomStream stream(seed, j);
    const double target = stream.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    auto i = static_cast<std::size_t>(it - cdf.begin());
    if (it == cdf.end()) {
      // target rounded up to the total: take the last occupied cell
      i = rho.size() - 1;
      while (rho[i] == 0.0) --i;
    }
    const double below = i == 0 ? 0.0 : cdf[i - 1];
    const double frac = std::clamp((target - below) / rho[i], 0.0, 1.0);
    x[j] = grid.wrap(grid.x(i) + (frac - 0.5) * grid.dx());
  }
  return x;
}

}  // namespace pilotwave
