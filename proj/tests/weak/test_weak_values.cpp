#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "pilotwave/errors.hpp"
#include "pilotwave/propagator.hpp"
#include "pilotwave/states.hpp"
#include "pilotwave/verification/oracles.hpp"
#include "pilotwave/weak.hpp"
#include "test_states.hpp"

using namespace pilotwave;

namespace {

const PhysicalConstants kNatural{};

std::vector<WaveFunction> sample_states(const SpatialGrid& grid) {
  return {gaussian_packet(grid, 0.0, 1.0, 0.0), gaussian_packet(grid, -1.5, 0.8, 2.0),
          superpose(cplx(1.0, 0.0), gaussian_packet(grid, -3.0, 1.0, 1.5), cplx(0.6, 0.3),
                    gaussian_packet(grid, 2.5, 1.2, -1.0)),
          harmonic_ground_state(grid, 1.0, 0.5, kNatural)};
}

}  // namespace

TEST_CASE("weak value of an eigenstate is its eigenvalue") {
  const SpatialGrid box(0.0, 2.0 * M_PI, 64);
  for (long m : {-5L, 0L, 3L}) {
    const auto pw = plane_wave(box, m);
    const auto r = weak_value(LinearOperator::momentum(), pw, pw, kNatural);
    CHECK(std::abs(r.value - static_cast<double>(m)) < 1e-10);
    CHECK(r.overlap_magnitude == doctest::Approx(1.0));
  }
  const SpatialGrid grid(-10.0, 10.0, 256);
  const auto g = harmonic_ground_state(grid, 1.0, 0.0, kNatural);
  const auto r = weak_value(LinearOperator::hamiltonian(Potential::harmonic(1.0)), g, g, kNatural);
  CHECK(std::abs(r.value - 0.5) < 1e-10);
  CHECK(r.value == r.raw_complex.real());
}

TEST_CASE("position weak value with a grid-delta post-selection") {
  const SpatialGrid grid(-10.0, 10.0, 256);
  const auto psi = gaussian_packet(grid, 0.3, 2.0, 1.0);
  for (double x_o : {-2.2, 0.0, 1.337, 4.9}) {
    const auto r = weak_value(LinearOperator::position(), psi, grid_delta(grid, x_o), kNatural);
    CHECK(std::abs(r.value - x_o) <= grid.dx());
  }
}

TEST_CASE("diagonal toy operator matches hand summation") {
  // three live cells; the fourth carries zero amplitude in both states
  const SpatialGrid grid(0.0, 4.0, 4);
  const WaveFunction psi_i(grid, {cplx(0.5, 0.1), cplx(-0.3, 0.6), cplx(0.2, -0.4), cplx(0.0, 0.0)});
  const WaveFunction psi_f(grid, {cplx(0.1, 0.7), cplx(0.4, 0.0), cplx(-0.2, 0.3), cplx(0.0, 0.0)});
  const auto op = LinearOperator::multiplication({1.0, 2.0, 3.0, 0.0}, "D");
  cplx num(0.0, 0.0), den(0.0, 0.0);
  const double d[3] = {1.0, 2.0, 3.0};
  for (int i = 0; i < 3; ++i) {
    num += std::conj(psi_f[i]) * d[i] * psi_i[i];
    den += std::conj(psi_f[i]) * psi_i[i];
  }
  const auto r = weak_value(op, psi_i, psi_f, kNatural);
  CHECK(std::abs(r.raw_complex - num / den) < 1e-14);
  CHECK(std::abs(r.value - (num / den).real()) < 1e-14);
}

TEST_CASE("orthogonal pre- and post-selection has no weak value") {
  const SpatialGrid box(0.0, 2.0 * M_PI, 32);
  CHECK_THROWS_AS(weak_value(LinearOperator::position(), plane_wave(box, 1), plane_wave(box, 2), kNatural),
                  VanishingOverlap);
  const SpatialGrid other(0.0, 1.0, 32);
  CHECK_THROWS_AS(weak_value(LinearOperator::position(), plane_wave(box, 1), plane_wave(other, 1), kNatural),
                  GridMismatch);
}

TEST_CASE("weak value is linear in the operator") {
  std::mt19937_64 rng(5);
  const SpatialGrid grid(-8.0, 8.0, 64);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const std::vector<LinearOperator> ops{LinearOperator::position(), LinearOperator::momentum(),
                                        LinearOperator::hamiltonian(Potential::harmonic(0.7))};
  for (int trial = 0; trial < 50; ++trial) {
    const auto psi_i = testing::random_state(grid, rng);
    const auto psi_f = testing::random_state(grid, rng);
    const auto& a_op = ops[trial % 3];
    const auto& b_op = ops[(trial + 1) % 3];
    const double a = u(rng), b = u(rng);
    const auto lhs = weak_value(a * a_op + b * b_op, psi_i, psi_f, kNatural).raw_complex;
    const auto rhs = a * weak_value(a_op, psi_i, psi_f, kNatural).raw_complex +
                     b * weak_value(b_op, psi_i, psi_f, kNatural).raw_complex;
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("local expectation of X is the coordinate array exactly") {
  std::mt19937_64 rng(17);
  const SpatialGrid grid(-5.0, 5.0, 128);
  for (int trial = 0; trial < 20; ++trial) {
    const auto psi = testing::random_state(grid, rng);
    const auto f = local_expectation(LinearOperator::position(), psi, kNatural);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(f.values[i] == grid.x(i));
  }
  // on the node of a standing wave too
  const SpatialGrid box(0.0, 2.0 * M_PI, 64);
  const auto standing = superpose(cplx(1.0, 0.0), plane_wave(box, 4), cplx(1.0, 0.0), plane_wave(box, -4));
  const auto f = local_expectation(LinearOperator::position(), standing, kNatural);
  CHECK(f.node_mask[4]);
  for (std::size_t i = 0; i < box.size(); ++i) CHECK(f.values[i] == box.x(i));
}

TEST_CASE("local expectation of V is the guiding velocity") {
  const SpatialGrid grid(-30.0, 30.0, 1024);
  for (const auto& psi : sample_states(grid)) {
    const auto f = local_expectation(LinearOperator::velocity(), psi, kNatural);
    const auto v = velocity_field(psi, kNatural);
    CHECK(f.node_mask == v.node_mask);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (f.node_mask[i]) {
        CHECK(std::isnan(f.values[i]));
        continue;
      }
      CHECK(std::abs(f.values[i] - v.values[i]) < 1e-10);
    }
  }
}

TEST_CASE("local expectation of H: eigenstate and bohmian energy") {
  const SpatialGrid grid(-10.0, 10.0, 512);
  const auto g = harmonic_ground_state(grid, 1.0, 0.0, kNatural);
  const auto f = local_expectation(LinearOperator::hamiltonian(Potential::harmonic(1.0)), g, kNatural);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!f.node_mask[i]) CHECK(std::abs(f.values[i] - 0.5) < 1e-6);
  }

  const SpatialGrid wide(-30.0, 30.0, 1024);
  const auto pot = Potential::gaussian_barrier(1.0, 1.0, 0.5);
  for (const auto& psi : sample_states(wide)) {
    const auto h = local_expectation(LinearOperator::hamiltonian(pot), psi, kNatural);
    const auto total = bohmian_energy(psi, pot, kNatural).total();
    for (std::size_t i = 0; i < wide.size(); ++i) {
      if (!h.node_mask[i]) CHECK(std::abs(h.values[i] - total[i]) < 1e-8);
    }
  }
}

TEST_CASE("ensemble average reproduces the expectation value") {
  const SpatialGrid grid(-30.0, 30.0, 1024);
  const auto real_gauss = gaussian_packet(grid, 0.0, 1.0, 0.0);
  CHECK(std::abs(ensemble_average(LinearOperator::velocity(), real_gauss, kNatural).value) < 1e-12);
  const auto shifted = gaussian_packet(grid, 2.75, 1.3, 0.0);
  CHECK(std::abs(ensemble_average(LinearOperator::position(), shifted, kNatural).value - 2.75) < 1e-8);

  const std::vector<LinearOperator> ops{
      LinearOperator::position(), LinearOperator::velocity(),
      LinearOperator::hamiltonian(Potential::harmonic(0.5)),
      LinearOperator::hamiltonian(Potential::gaussian_barrier(2.0, 0.7))};
  for (const auto& psi : sample_states(grid)) {
    for (const auto& op : ops) {
      const auto avg = ensemble_average(op, psi, kNatural);
      const double exact = expectation(op, psi, kNatural);
      CHECK(std::abs(avg.value - exact) < 1e-8 + avg.leakage_bound());
      CHECK(avg.masked_mass >= 0.0);
    }
  }

  // a state with real nodes: the leakage term is reported, not hidden
  const SpatialGrid box(0.0, 2.0 * M_PI, 64);
  const auto standing = superpose(cplx(1.0, 0.0), plane_wave(box, 4), cplx(1.0, 0.0), plane_wave(box, -4));
  const auto avg = ensemble_average(LinearOperator::hamiltonian(Potential::free()), standing, kNatural);
  CHECK(avg.masked_mass > 0.0);
  CHECK(std::abs(avg.value - expectation(LinearOperator::hamiltonian(Potential::free()), standing, kNatural)) <
        1e-8 + avg.leakage_bound());
}

TEST_CASE("trajectory ensemble averages") {
  const SpatialGrid grid(-30.0, 30.0, 512);
  const auto psi0 = gaussian_packet(grid, 0.7, 1.0, 0.5);
  const auto snaps = evolve(psi0, Potential::free(), EvolutionPlan{0.005, 200, 100}, kNatural);
  const auto ens = integrate_trajectories(sample_quantum_equilibrium(psi0, 10000, 31), snaps, kNatural);
  const auto& psi_t = snaps.back();
  const auto avg = trajectory_ensemble_average(LinearOperator::position(), ens, psi_t, kNatural);
  CHECK(avg.n_used + avg.n_skipped == 10000);
  CHECK(std::abs(avg.value - expectation(LinearOperator::position(), psi_t, kNatural)) < 3.0 * avg.standard_error);
  CHECK_THROWS_AS(trajectory_ensemble_average(LinearOperator::position(), ens, psi_t.at_time(0.3), kNatural),
                  TimeMismatch);

  const SpatialGrid box(0.0, 2.0 * M_PI, 64);
  const auto pw = plane_wave(box, 3);
  const auto pw_snaps = evolve(pw, Potential::free(), EvolutionPlan{0.01, 20, 10}, kNatural);
  const auto pw_ens = integrate_trajectories(sample_quantum_equilibrium(pw, 100, 1), pw_snaps, kNatural);
  CHECK(trajectory_ensemble_average(LinearOperator::velocity(), pw_ens, pw_snaps.back(), kNatural).value ==
        doctest::Approx(3.0).epsilon(1e-12));

  const SpatialGrid ho(-10.0, 10.0, 256);
  const auto g = harmonic_ground_state(ho, 1.0, 0.0, kNatural);
  const auto g_ens = integrate_trajectories(sample_quantum_equilibrium(g, 200, 2), std::vector<WaveFunction>{g}, kNatural);
  const auto e = trajectory_ensemble_average(LinearOperator::hamiltonian(Potential::harmonic(1.0)), g_ens, g, kNatural);
  CHECK(std::abs(e.value - 0.5) < 1e-6);
}

TEST_CASE("sum rule: plane wave and grid delta") {
  const SpatialGrid grid(0.5 - M_PI, 0.5 + M_PI, 64);
  const auto r = sum_rule_check(LinearOperator::velocity(), LinearOperator::position(),
                                plane_wave(grid, 4), grid_delta(grid, 0.5), 4.0, 0.5, kNatural);
  CHECK(r.residual < 1e-6);
  CHECK(r.p_weak.value == doctest::Approx(4.0));
  CHECK(r.q_weak.value == doctest::Approx(0.5));
}

TEST_CASE("sum rule: zero operators") {
  const SpatialGrid grid(-5.0, 5.0, 32);
  std::mt19937_64 rng(3);
  const auto a = testing::random_state(grid, rng);
  const auto b = testing::random_state(grid, rng);
  const auto zero = 0.0 * LinearOperator::position();
  const auto r = sum_rule_check(zero, zero, a, b, 0.0, 0.0, kNatural);
  CHECK(r.sum_weak.value == 0.0);
  CHECK(r.residual == 0.0);
}

TEST_CASE("sum rule: random Hermitian toy operators") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = oracles::random_sum_rule_instance(seed);
    const auto p_op = LinearOperator::dense(inst.p_matrix, "P");
    const auto q_op = LinearOperator::dense(inst.q_matrix, "Q");
    const auto r = sum_rule_check(p_op, q_op, inst.psi_i, inst.psi_f, inst.p, inst.q, kNatural, 1e-8);
    CHECK(r.residual < 1e-10);
    CHECK(std::abs(r.p_weak.raw_complex - oracles::brute_force_weak_value(inst.p_matrix, inst.psi_i, inst.psi_f)) < 1e-12);
    CHECK(std::abs(r.q_weak.value - inst.q) < 1e-10);
  }
}

TEST_CASE("sum rule rejects unmet eigen-conditions") {
  const SpatialGrid grid(-5.0, 5.0, 64);
  const auto g = gaussian_packet(grid, 0.0, 1.0, 0.0);
  try {
    sum_rule_check(LinearOperator::position(), LinearOperator::position(), g, g, 0.0, 0.0, kNatural);
    FAIL("expected PreconditionViolated");
  } catch (const PreconditionViolated& e) {
    CHECK(e.residual() > 0.5);
  }
}

TEST_CASE("velocity plus position counterexample") {
  const double x_o = 0.5;
  const SpatialGrid grid(x_o - M_PI, x_o + M_PI, 64);
  const auto r = counterexample_v_plus_x(4, x_o, grid, kNatural);
  CHECK(r.x_node == x_o);
  CHECK(std::abs(r.velocity.value - 4.0) < 1e-8);
  CHECK(std::abs(r.position.value - 0.5) < 1e-8);
  CHECK(std::abs(r.sum.value - 4.5) < 1e-8);
  CHECK(std::abs(counterexample_v_plus_x(0, x_o, grid, kNatural).sum.value - x_o) < 1e-8);
  CHECK(std::abs(counterexample_v_plus_x(-4, x_o, grid, kNatural).sum.value - (-4.0 + x_o)) < 1e-8);

  std::ostringstream out;
  write_report_json(report_entries(r, 1e-8), out);
  const auto doc = nlohmann::json::parse(out.str());
  REQUIRE(doc.size() == 3);
  CHECK(doc[2]["label"] == "<V + X>_w");
  CHECK(doc[2]["pass"] == true);
  CHECK(doc[2]["tolerance"] == 1e-8);
  CHECK(doc[2]["value"].get<double>() == doctest::Approx(4.5));
}
