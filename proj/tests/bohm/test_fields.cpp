#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pilotwave/bohm.hpp"
#include "pilotwave/errors.hpp"
#include "pilotwave/operators.hpp"
#include "pilotwave/propagator.hpp"
#include "pilotwave/spectral.hpp"
#include "pilotwave/states.hpp"
#include "test_states.hpp"

using namespace pilotwave;

namespace {

const PhysicalConstants kNatural{};

}  // namespace

TEST_CASE("current of real and plane-wave states") {
  const SpatialGrid grid(-20.0, 20.0, 512);
  const auto real_gauss = gaussian_packet(grid, 1.0, 1.5, 0.0);
  for (double j : current_density(real_gauss, kNatural)) CHECK(std::abs(j) < 1e-12);

  const SpatialGrid box(0.0, 2.0 * M_PI, 64);
  for (long m : {-7L, -1L, 1L, 3L, 31L}) {
    const auto pw = plane_wave(box, m);
    const double k = box.wavenumber_of(m);
    for (double j : current_density(pw, kNatural)) CHECK(j == doctest::Approx(k / box.length()).epsilon(1e-12));
  }
}

TEST_CASE("current of a boosted Gaussian is k0 times density") {
  const SpatialGrid grid(-30.0, 30.0, 1024);
  const double k0 = 1.7;
  const auto psi = gaussian_packet(grid, -2.0, 1.2, k0);
  const auto j = current_density(psi, kNatural);
  const auto rho = psi.density();
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(j[i] - k0 * rho[i]) < 1e-10);
}

TEST_CASE("velocity sign and magnitude for every representable plane wave") {
  const SpatialGrid box(0.0, 2.0 * M_PI, 32);
  const PhysicalConstants c{0.7, 2.3};
  for (long m = -15; m <= 15; ++m) {
    const auto field = velocity_field(plane_wave(box, m), c);
    const double expected = c.hbar * box.wavenumber_of(m) / c.mass;
    for (std::size_t i = 0; i < box.size(); ++i) {
      REQUIRE_FALSE(field.node_mask[i]);
      CHECK(std::abs(field.values[i] - expected) < 1e-11);
    }
  }
}

TEST_CASE("velocity of a real ground state vanishes") {
  const SpatialGrid grid(-10.0, 10.0, 256);
  const auto field = velocity_field(harmonic_ground_state(grid, 1.0, 0.0, kNatural), kNatural);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!field.node_mask[i]) CHECK(std::abs(field.values[i]) < 1e-10);
  }
}

TEST_CASE("velocity of counter-propagating waves against refined grid") {
  // Equal-weight +-k superposition with a relative phase, plus an unequal
  // one whose velocity is nonzero between nodes.
  auto build = [](const SpatialGrid& g, cplx a, cplx b) {
    return superpose(a, plane_wave(g, 4), b, plane_wave(g, -4));
  };
  for (auto [a, b] : {std::pair{cplx(1.0, 0.0), cplx(1.0, 0.0)},
                      std::pair{cplx(1.0, 0.0), std::polar(1.0, 0.8)},
                      std::pair{cplx(1.0, 0.0), cplx(0.4, 0.2)}}) {
    const SpatialGrid coarse(0.0, 2.0 * M_PI, 64);
    const SpatialGrid fine(0.0, 2.0 * M_PI, 512);
    const auto vc = velocity_field(build(coarse, a, b), kNatural);
    const auto vf = velocity_field(build(fine, a, b), kNatural);
    std::size_t masked = 0;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      if (vc.node_mask[i]) {
        ++masked;
        CHECK(std::isnan(vc.values[i]));
        continue;
      }
      REQUIRE(std::isfinite(vc.values[i]));
      CHECK(std::abs(vc.values[i] - vf.values[8 * i]) < 1e-6);
    }
    if (b == cplx(1.0, 0.0)) CHECK(masked > 0);  // nodes of cos(4x) sit on grid points
  }
}

TEST_CASE("velocity floor must lie in (0, 1e-3]") {
  const SpatialGrid grid(0.0, 1.0, 16);
  const auto psi = plane_wave(grid, 1);
  CHECK_THROWS_AS(velocity_field(psi, kNatural, 0.0), InvalidArgument);
  CHECK_THROWS_AS(velocity_field(psi, kNatural, 2e-3), InvalidArgument);
  CHECK_NOTHROW(velocity_field(psi, kNatural, 1e-3));
}

TEST_CASE("continuity equation holds for evolved states") {
  const SpatialGrid grid(-20.0, 20.0, 512);
  const double dt = 1e-4;
  struct Case {
    Potential potential;
    WaveFunction psi0;
  };
  std::vector<Case> cases{
      {Potential::free(), gaussian_packet(grid, -3.0, 1.0, 2.0)},
      {Potential::harmonic(0.8, 1.0), gaussian_packet(grid, 2.0, 0.7, -1.0)},
      {Potential::gaussian_barrier(3.0, 0.5), gaussian_packet(grid, -4.0, 1.0, 2.5)},
  };
  for (const auto& cs : cases) {
    const SplitOperatorPropagator prop(grid, cs.potential, dt, kNatural);
    const auto before = prop.evolve(cs.psi0, 1999, 1999).back();
    const auto mid = prop.step(before);
    const auto plus = prop.step(mid).density();
    const auto minus = before.density();
    const auto j = current_density(mid, kNatural);
    const auto dj = spectral::derivative(grid, std::vector<cplx>(j.begin(), j.end()), 1);
    double res = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double drho = (plus[i] - minus[i]) / (2.0 * dt);
      res = std::max(res, std::abs(drho + dj[i].real()));
      scale = std::max(scale, std::abs(drho));
    }
    CHECK(res / scale < 1e-4);
  }
}

TEST_CASE("bohmian energy of eigenstates and plane waves") {
  const SpatialGrid grid(-10.0, 10.0, 512);
  const auto ground = harmonic_ground_state(grid, 1.0, 0.0, kNatural);
  const auto e = bohmian_energy(ground, Potential::harmonic(1.0), kNatural);
  const auto total = e.total();
  std::size_t checked = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (e.node_mask[i]) {
      CHECK(std::isnan(total[i]));
      continue;
    }
    ++checked;
    CHECK(std::abs(e.kinetic[i]) < 1e-20);
    CHECK(std::abs(total[i] - 0.5) < 1e-6);
  }
  CHECK(checked > grid.size() / 4);

  const SpatialGrid box(0.0, 2.0 * M_PI, 64);
  const auto pw = bohmian_energy(plane_wave(box, 5), Potential::free(), kNatural);
  for (std::size_t i = 0; i < box.size(); ++i) {
    CHECK(std::abs(pw.quantum[i]) < 1e-10);
    CHECK(pw.total()[i] == doctest::Approx(12.5).epsilon(1e-12));
  }
}

TEST_CASE("quantum potential agrees with R'' of |psi| for smooth states") {
  const SpatialGrid grid(-20.0, 20.0, 512);
  const std::vector<WaveFunction> states{gaussian_packet(grid, 0.0, 1.0, 0.0),
                                         gaussian_packet(grid, 1.5, 1.3, 2.0),
                                         harmonic_ground_state(grid, 0.7, -1.0, kNatural)};
  for (const auto& psi : states) {
    std::vector<double> r(psi.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::abs(psi[i]);
    const auto r2 = spectral::second_derivative(grid, r);
    const auto e = bohmian_energy(psi, Potential::free(), kNatural);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (e.node_mask[i] || std::abs(grid.x(i)) > 6.0) continue;
      CHECK(std::abs(e.quantum[i] + 0.5 * r2[i] / r[i]) < 1e-8);
    }
  }
}

TEST_CASE("bohmian energy equals Re(H psi / psi) off the mask") {
  std::mt19937_64 rng(41);
  const SpatialGrid grid(-15.0, 15.0, 256);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const auto psi = superpose(cplx(1.0, 0.0), gaussian_packet(grid, u(rng), 1.0 + 0.3 * std::abs(u(rng)), u(rng)),
                               testing::random_complex(rng),
                               gaussian_packet(grid, u(rng), 1.2, u(rng)));
    const auto pot = Potential::harmonic(0.5, u(rng));
    const auto e = bohmian_energy(psi, pot, kNatural);
    const auto h_psi = apply(LinearOperator::hamiltonian(pot), psi, kNatural);
    const auto total = e.total();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (e.node_mask[i]) continue;
      const double local = (h_psi[i] / psi[i]).real();
      CHECK(std::abs(total[i] - local) < 1e-8 * std::max(1.0, std::abs(local)));
    }
  }
}
