#include <algorithm>
#include <cmath>
#include <map>

#include "pilotwave/errors.hpp"
#include "pilotwave/measurement.hpp"
#include "pilotwave/propagator.hpp"

namespace pilotwave {

namespace {

// Stream family for pointer draws, disjoint in practice from the position draws.
constexpr std::uint64_t kPointerStreamSalt = 0x9E3779B97F4A7C15ULL;

}  // namespace

BackactionReport backaction_demo(const WaveFunction& psi, const LinearOperator& op,
                                 const Pointer& pointer, double g, double horizon,
                                 const Potential& potential, const PhysicalConstants& constants,
                                 const BackactionOptions& options) {
  if (!(horizon > 0.0)) throw InvalidArgument("backaction horizon must be > 0");
  if (options.n_trajectories == 0) throw InvalidArgument("backaction needs at least one trajectory");
  const EvolutionPlan plan{horizon / static_cast<double>(options.n_steps), options.n_steps,
                           options.snapshot_stride};
  plan.validate();

  const auto x0 = sample_quantum_equilibrium(psi, options.n_trajectories, options.seed);
  const auto free_run = integrate_trajectories(x0, evolve(psi, potential, plan, constants), constants);

  const auto joint = impulsive_couple(prepare_joint(psi, pointer), op, g, constants);
  const JointSampler sampler(joint);
  std::map<std::size_t, std::vector<std::size_t>> by_column;
  for (std::size_t j = 0; j < x0.size(); ++j) {
    RandomStream stream(options.seed ^ kPointerStreamSalt, j);
    by_column[sampler.sample_column(x0[j], stream)].push_back(j);
  }

  BackactionReport report{g, horizon, 0.0, 0.0, free_run.frozen_count(), options.integrator_tolerance};
  double total = 0.0;
  for (const auto& [column, members] : by_column) {
    const auto chi = normalize(joint.conditional_system_state(column));
    std::vector<double> starts;
    for (std::size_t j : members) starts.push_back(x0[j]);
    const auto guided = integrate_trajectories(starts, evolve(chi, potential, plan, constants), constants);
    report.frozen += guided.frozen_count();
    for (std::size_t m = 0; m < members.size(); ++m) {
      double d = 0.0;
      for (std::size_t k = 0; k < guided.times().size(); ++k) {
        d = std::max(d, std::abs(guided.unwrapped(m, k) - free_run.unwrapped(members[m], k)));
      }
      report.max_divergence = std::max(report.max_divergence, d);
      total += d;
    }
  }
  report.mean_divergence = total / static_cast<double>(x0.size());
  return report;
}

}  // namespace pilotwave
