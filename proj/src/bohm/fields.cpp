#include <cmath>
#include <limits>

#include "pilotwave/bohm.hpp"
#include "pilotwave/spectral.hpp"

namespace pilotwave {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::vector<double> current_density(const WaveFunction& psi, const PhysicalConstants& constants) {
  constants.validate();
  const auto dpsi = spectral::derivative(psi.grid(), psi.amplitudes(), 1);
  const double scale = constants.hbar / constants.mass;
  std::vector<double> j(psi.size());
  for (std::size_t i = 0; i < j.size(); ++i) j[i] = scale * (std::conj(psi[i]) * dpsi[i]).imag();
  return j;
}

VelocityField velocity_field(const WaveFunction& psi, const PhysicalConstants& constants,
                             double floor) {
  auto mask = node_mask(psi, floor);
  const auto j = current_density(psi, constants);
  std::vector<double> v(psi.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = mask[i] ? kNaN : j[i] / std::norm(psi[i]);
  return {psi.grid(), std::move(v), std::move(mask), psi.time()};
}

std::vector<double> BohmianEnergyField::total() const {
  std::vector<double> t(kinetic.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = kinetic[i] + classical[i] + quantum[i];
  return t;
}

BohmianEnergyField bohmian_energy(const WaveFunction& psi, const Potential& potential,
                                  const PhysicalConstants& constants, double floor) {
  const auto field = velocity_field(psi, constants, floor);
  const auto v_pot = potential.tabulate(psi.grid(), constants);

  // R''/R = Re(psi''/psi) + (m v / hbar)^2. Differentiating psi instead of
  // |psi| avoids the kinks |psi| develops near nodes.
  const auto d2psi = spectral::derivative(psi.grid(), psi.amplitudes(), 2);

  BohmianEnergyField e{psi.grid(), {}, {}, {}, field.node_mask};
  e.kinetic.resize(psi.size());
  e.classical.resize(psi.size());
  e.quantum.resize(psi.size());
  const double q_scale = -constants.hbar * constants.hbar / (2.0 * constants.mass);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (field.node_mask[i]) {
      e.kinetic[i] = e.classical[i] = e.quantum[i] = kNaN;
      continue;
    }
    e.kinetic[i] = 0.5 * constants.mass * field.values[i] * field.values[i];
    e.classical[i] = v_pot[i];
    const double p = constants.mass * field.values[i] / constants.hbar;
    e.quantum[i] = q_scale * ((d2psi[i] / psi[i]).real() + p * p);
  }
  return e;
}

}  // namespace pilotwave
