#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pilotwave/errors.hpp"
#include "pilotwave/measurement.hpp"
#include "pilotwave/propagator.hpp"
#include "pilotwave/states.hpp"
#include "pilotwave/verification/oracles.hpp"

using namespace pilotwave;

namespace {

const PhysicalConstants kNatural{};

// Free Gaussian (sigma0 = 1, k0 = 1) after unit time: velocity 1 + (x - 1)/5.
WaveFunction chirped(const SpatialGrid& grid) {
  return oracles::free_gaussian_state(grid, 0.0, 1.0, 1.0, 1.0, kNatural);
}

const SpatialGrid kSys(-20.0, 20.0, 256);
const Pointer kPointer(SpatialGrid(-16.0, 16.0, 256), 1.0);

ProtocolConfig config(double g, std::size_t n, std::uint64_t seed = 2024) {
  ProtocolConfig c;
  c.coupling_g = g;
  c.n_runs = n;
  c.f_bin_width = 0.625;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("protocol config validation collects every violation") {
  ProtocolConfig c;
  c.coupling_g = -1.0;
  c.n_runs = 0;
  c.f_bin_width = 0.01;
  try {
    c.validate(kSys);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.violations().size() == 3);
  }
  CHECK_NOTHROW(config(0.1, 1).validate(kSys));
}

TEST_CASE("weak velocity protocol converges to the guiding velocity") {
  const auto psi = chirped(kSys);
  const double g = 0.08;
  const auto v = velocity_field(psi, kNatural);
  double sup = 0.0;
  for (std::size_t i = 0; i < kSys.size(); ++i) {
    if (!v.node_mask[i]) sup = std::max(sup, std::abs(v.values[i]));
  }
  REQUIRE(g * sup / kPointer.sigma() <= 0.2);

  const auto out = run_protocol(psi, LinearOperator::velocity(), kPointer, config(g, 100000), kNatural);
  std::size_t total = 0, central = 0;
  for (const auto& b : out.bins) {
    total += b.count;
    if (!b.central) continue;
    ++central;
    MESSAGE("bin " << b.center << ": " << b.estimate << " +- " << b.standard_error << " exact " << b.exact_value);
    CHECK(std::abs(b.deviation()) < 3.0 * b.standard_error);
    // the weighted bin average of the linear field is the field at the weighted centroid
    CHECK(std::abs(b.expected_estimate - b.exact_value) < 0.01);
  }
  CHECK(total == 100000);
  CHECK(central >= 3);
}

TEST_CASE("position protocol recovers the bin centers") {
  const auto psi = gaussian_packet(kSys, 0.5, 1.5, 0.7);
  const auto out = run_protocol(psi, LinearOperator::position(), kPointer, config(0.1, 50000, 5), kNatural);
  for (const auto& b : out.bins) {
    if (b.count < 100) continue;
    CHECK(std::abs(b.estimate - b.center) < out.bin_width + 3.0 * b.standard_error);
  }
}

TEST_CASE("a single run fills one bin and has no standard error") {
  const auto out = run_protocol(chirped(kSys), LinearOperator::velocity(), kPointer, config(0.1, 1), kNatural);
  std::size_t filled = 0;
  for (const auto& b : out.bins) {
    if (b.count == 0) continue;
    ++filled;
    CHECK(b.count == 1);
    CHECK(std::isfinite(b.estimate));
    CHECK(std::isnan(b.standard_error));
  }
  CHECK(filled == 1);
  std::ostringstream csv;
  write_protocol_csv(out, csv);
  CHECK(csv.str().find(",nan,") != std::string::npos);
}

TEST_CASE("standard error scales as one over root N") {
  const auto psi = chirped(kSys);
  std::vector<double> log_n, log_se;
  for (std::size_t n : {1000UL, 10000UL, 100000UL}) {
    const auto out = run_protocol(psi, LinearOperator::velocity(), kPointer, config(0.08, n, 77), kNatural);
    log_n.push_back(std::log(static_cast<double>(n)));
    log_se.push_back(std::log(out.peak_bin().standard_error));
  }
  const double mx = (log_n[0] + log_n[1] + log_n[2]) / 3.0, my = (log_se[0] + log_se[1] + log_se[2]) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (log_n[i] - mx) * (log_se[i] - my);
    sxx += (log_n[i] - mx) * (log_n[i] - mx);
  }
  const double slope = sxy / sxx;
  MESSAGE("SE exponent " << slope);
  CHECK(slope >= -0.6);
  CHECK(slope <= -0.4);
}

TEST_CASE("bias shrinks with the coupling") {
  const auto psi = chirped(kSys);
  const std::vector<double> gs{0.64, 0.32, 0.16, 0.08};
  const auto report = bias_scan(psi, LinearOperator::velocity(), kPointer, gs, config(1.0, 20000, 3), kNatural);
  REQUIRE(report.entries.size() == 4);
  for (double r : report.quadrature_ratios()) {
    MESSAGE("bias ratio " << r);
    CHECK(r < 0.7);
  }
  CHECK_THROWS_AS(bias_scan(psi, LinearOperator::velocity(), kPointer, std::vector<double>{0.1, 0.2},
                            config(1.0, 10), kNatural),
                  InvalidArgument);
}

TEST_CASE("strong coupling leaves the weak regime") {
  const auto psi = chirped(kSys);
  const std::vector<double> gs{4.0};
  const auto strong = bias_scan(psi, LinearOperator::velocity(), kPointer, gs, config(1.0, 20000, 3), kNatural);
  const std::vector<double> weak_g{0.08};
  const auto weak = bias_scan(psi, LinearOperator::velocity(), kPointer, weak_g, config(1.0, 20000, 3), kNatural);
  MESSAGE("strong bias " << strong.entries[0].quadrature_bias << " weak bias " << weak.entries[0].quadrature_bias);
  CHECK(std::abs(strong.entries[0].quadrature_bias) > 100.0 * std::abs(weak.entries[0].quadrature_bias));
}

TEST_CASE("position coupling is unbiased at every g") {
  const auto psi = gaussian_packet(kSys, 0.0, 1.5, 0.0);
  const Pointer wide(SpatialGrid(-64.0, 64.0, 1024), 1.0);
  const std::vector<double> gs{2.0, 1.0, 0.5, 0.25};
  const auto report = bias_scan(psi, LinearOperator::position(), wide, gs, config(1.0, 20000, 4), kNatural);
  for (const auto& e : report.entries) {
    CHECK(std::abs(e.quadrature_bias) < 1e-10);
    CHECK(std::abs(e.sampled_bias) < 3.0 * e.standard_error);
  }
}

TEST_CASE("backaction of the coupling on trajectories") {
  const SpatialGrid sys(-20.0, 20.0, 256);
  const auto psi = gaussian_packet(sys, 0.0, 1.0, 1.0);
  BackactionOptions opt;
  opt.n_trajectories = 64;
  opt.seed = 6;
  const auto zero = backaction_demo(psi, LinearOperator::velocity(), kPointer, 0.0, 2.0,
                                    Potential::free(), kNatural, opt);
  CHECK(zero.max_divergence < opt.integrator_tolerance);

  double previous = 0.0;
  for (double g : {0.1, 0.2, 0.4, 0.8}) {
    const auto r = backaction_demo(psi, LinearOperator::velocity(), kPointer, g, 2.0, Potential::free(),
                                   kNatural, opt);
    MESSAGE("g " << g << " max divergence " << r.max_divergence << " mean " << r.mean_divergence);
    CHECK(r.max_divergence > 10.0 * opt.integrator_tolerance);
    CHECK(r.max_divergence > previous);
    previous = r.max_divergence;
  }
}

TEST_CASE("protocol CSV layout") {
  auto cfg = config(0.1, 200, 1);
  cfg.keep_pairs = true;
  const auto out = run_protocol(chirped(kSys), LinearOperator::velocity(), kPointer, cfg, kNatural);
  std::ostringstream bins, pairs;
  write_protocol_csv(out, bins);
  write_pairs_csv(out, pairs);
  CHECK(bins.str().rfind("bin_center,count,estimate,stderr,exact_value,deviation\n", 0) == 0);
  CHECK(pairs.str().rfind("run_id,o,f\n0,", 0) == 0);
  const std::string text = pairs.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 201);
}
