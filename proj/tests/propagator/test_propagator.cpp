#include <doctest.h>

#include <cmath>

#include "pilotwave/errors.hpp"
#include "pilotwave/operators.hpp"
#include "pilotwave/propagator.hpp"
#include "pilotwave/states.hpp"
#include "pilotwave/verification/oracles.hpp"

using namespace pilotwave;

namespace {

const PhysicalConstants kNatural{};

struct Moments {
  double mean;
  double width;
};

Moments moments(const WaveFunction& psi) {
  double m0 = 0, m1 = 0, m2 = 0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double rho = std::norm(psi[i]);
    const double x = psi.grid().x(i);
    m0 += rho;
    m1 += rho * x;
    m2 += rho * x * x;
  }
  const double mean = m1 / m0;
  return {mean, std::sqrt(m2 / m0 - mean * mean)};
}

}  // namespace

TEST_CASE("plan validation") {
  CHECK_NOTHROW((EvolutionPlan{0.1, 10, 5}.validate()));
  CHECK_NOTHROW((EvolutionPlan{0.1, 0, 1}.validate()));
  CHECK_THROWS_AS((EvolutionPlan{0.0, 10, 5}.validate()), InvalidArgument);
  CHECK_THROWS_AS((EvolutionPlan{0.1, 10, 3}.validate()), InvalidArgument);
  CHECK_THROWS_AS((EvolutionPlan{0.1, 10, 0}.validate()), InvalidArgument);
}

TEST_CASE("default step keeps the Nyquist phase below 0.1 rad") {
  const SpatialGrid g(-20.0, 20.0, 512);
  for (const PhysicalConstants c : {PhysicalConstants{1, 1}, PhysicalConstants{2, 0.5}}) {
    const double dt = default_time_step(g, c);
    const double phase = c.hbar * g.k_max() * g.k_max() * dt / (2.0 * c.mass);
    CHECK(phase < 0.1);
    CHECK(phase > 0.09);
  }
}

TEST_CASE("free plane wave acquires only a global phase") {
  const SpatialGrid g(0.0, 2.0 * M_PI, 64);
  const PhysicalConstants c{1.0, 1.7};
  const double dt = 0.013;
  for (long n : {-5L, 0L, 3L}) {
    const auto psi = plane_wave(g, n);
    const auto next = split_step(psi, Potential::free(), dt, c);
    const double k = g.wavenumber_of(n);
    const cplx phase = std::polar(1.0, -c.hbar * k * k * dt / (2.0 * c.mass));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(next[i] - phase * psi[i]) < 1e-14);
    CHECK(next.time() == doctest::Approx(dt));
  }
}

TEST_CASE("harmonic ground state is stationary") {
  const SpatialGrid g(-10.0, 10.0, 512);
  const auto psi = harmonic_ground_state(g, 1.0, 0.0, kNatural);
  // Strang's stationary state differs from the exact one at O(dt^2); the
  // default step keeps that below 1e-10.
  const double dt = default_time_step(g, kNatural);
  const std::size_t steps = 25 * static_cast<std::size_t>(std::ceil(2.0 * M_PI / dt / 25.0));
  const auto snaps = evolve(psi, Potential::harmonic(1.0), {dt, steps, steps / 25}, kNatural);
  REQUIRE(snaps.size() == 26);
  for (const auto& s : snaps) {
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(std::abs(s[i]) - std::abs(psi[i])) < 1e-10);
  }
}

TEST_CASE("free Gaussian spreads and drifts as the analytic packet") {
  const SpatialGrid g(-40.0, 40.0, 1024);
  const double sigma0 = 1.0, k0 = 1.5, x0 = -3.0;
  const auto psi = gaussian_packet(g, x0, sigma0, k0);
  const double dt = default_time_step(g, kNatural);
  const std::size_t steps = 4000;
  const auto snaps = evolve(psi, Potential::free(), {dt, steps, 1000}, kNatural);
  REQUIRE(snaps.size() == 5);
  for (const auto& s : snaps) {
    const double t = s.time();
    const auto m = moments(s);
    CHECK(std::abs(m.width / oracles::free_gaussian_width(sigma0, t, kNatural) - 1.0) < 1e-3);
    if (t > 0) {
      const double drift = m.mean - x0;
      const double expected = oracles::free_gaussian_center(x0, k0, t, kNatural) - x0;
      CHECK(std::abs(drift / expected - 1.0) < 1e-3);
    }
  }
  // whole wavefunction against the closed form
  const auto& last = snaps.back();
  const auto exact = oracles::free_gaussian_state(g, x0, sigma0, k0, last.time(), kNatural);
  CHECK(oracles::phase_aligned_distance(last, exact) < 1e-9);
}

TEST_CASE("evolve with zero steps returns the initial state") {
  const SpatialGrid g(-10.0, 10.0, 128);
  const auto psi = gaussian_packet(g, 0.0, 1.0, 0.0);
  const auto snaps = evolve(psi, Potential::harmonic(1.0), {0.01, 0, 1}, kNatural);
  REQUIRE(snaps.size() == 1);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(snaps[0][i] == psi[i]);
  CHECK(snaps[0].time() == psi.time());
}

TEST_CASE("coherent state center oscillates classically") {
  const SpatialGrid g(-20.0, 20.0, 512);
  const double omega = 1.0, xc = 3.0;
  const auto psi = oracles::coherent_state(g, omega, xc, 0.0, kNatural);
  const double period = 2.0 * M_PI / omega;
  const std::size_t steps = 4000;
  const auto snaps = evolve(psi, Potential::harmonic(omega), {period / steps, steps, 100}, kNatural);
  for (const auto& s : snaps) {
    const double expected = xc * std::cos(omega * s.time());
    CHECK(std::abs(moments(s).mean - expected) < 5e-3 * xc);
  }
}

TEST_CASE("norm is conserved for every potential kind") {
  const SpatialGrid g(-20.0, 20.0, 256);
  std::vector<double> custom(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) custom[i] = 0.3 * std::sin(g.x(i)) + 0.01 * g.x(i) * g.x(i);
  const auto psi = gaussian_packet(g, -4.0, 1.0, 2.0);
  const double dt = default_time_step(g, kNatural);

  for (const auto& pot : {Potential::free(), Potential::harmonic(0.5, 1.0),
                          Potential::gaussian_barrier(2.0, 0.5), Potential::custom(custom)}) {
    const SplitOperatorPropagator prop(g, pot, dt, kNatural);
    auto one = prop.step(psi);
    CHECK(std::abs(one.norm_squared() - 1.0) < 1e-14);
    const auto snaps = prop.evolve(psi, 10000, 10000);
    CHECK_MESSAGE(std::abs(snaps.back().norm_squared() - 1.0) < 1e-10, pot.label());
  }
}

TEST_CASE("energy is conserved for time-independent potentials") {
  const SpatialGrid g(-20.0, 20.0, 512);
  const double dt = default_time_step(g, kNatural);
  struct Case {
    Potential pot;
    WaveFunction psi;
  };
  const std::vector<Case> cases = {
      {Potential::harmonic(1.0), oracles::coherent_state(g, 1.0, 2.0, 0.0, kNatural)},
      {Potential::gaussian_barrier(1.5, 0.7), gaussian_packet(g, -5.0, 1.0, 1.5)},
      {Potential::free(), gaussian_packet(g, 0.0, 0.8, -1.0)},
  };
  for (const auto& c : cases) {
    const auto H = LinearOperator::hamiltonian(c.pot);
    const double e0 = expectation(H, c.psi, kNatural);
    const auto snaps = evolve(c.psi, c.pot, {dt, 10000, 10000}, kNatural);
    const double e1 = expectation(H, snaps.back(), kNatural);
    CHECK_MESSAGE(std::abs(e1 - e0) / std::abs(e0) < 1e-6, c.pot.label());
  }
}

TEST_CASE("Strang splitting converges at second order in dt") {
  const SpatialGrid g(-20.0, 20.0, 256);
  const double omega = 1.0;
  const auto psi = oracles::coherent_state(g, omega, 2.0, 0.0, kNatural);
  const double T = 2.0 * M_PI;
  auto error_for = [&](std::size_t steps) {
    const auto snaps = evolve(psi, Potential::harmonic(omega), {T / steps, steps, steps}, kNatural);
    return oracles::phase_aligned_distance(snaps.back(),
                                           oracles::coherent_state(g, omega, 2.0, T, kNatural));
  };
  const double coarse = error_for(200);
  const double fine = error_for(400);
  MESSAGE("error(dt)=" << coarse << " error(dt/2)=" << fine);
  CHECK(coarse / fine > 3.0);
  CHECK(coarse / fine < 5.0);
}
