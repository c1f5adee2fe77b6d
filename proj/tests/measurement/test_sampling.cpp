#include <doctest.h>

#include <array>
#include <cmath>

#include "pilotwave/measurement.hpp"
#include "pilotwave/states.hpp"

using namespace pilotwave;

namespace {

const PhysicalConstants kNatural{};

double correlation(const std::vector<PointerReading>& pairs) {
  double so = 0, sf = 0, soo = 0, sff = 0, sof = 0;
  for (const auto& p : pairs) {
    so += p.o;
    sf += p.f;
    soo += p.o * p.o;
    sff += p.f * p.f;
    sof += p.o * p.f;
  }
  const double n = static_cast<double>(pairs.size());
  const double cov = sof / n - so * sf / (n * n);
  return cov / std::sqrt((soo / n - so * so / (n * n)) * (sff / n - sf * sf / (n * n)));
}

std::vector<PointerReading> draw(const JointSampler& s, std::size_t n, std::uint64_t seed,
                                 SamplingOrder order = SamplingOrder::Joint) {
  std::vector<PointerReading> out;
  for (std::size_t r = 0; r < n; ++r) {
    RandomStream stream(seed, r);
    out.push_back(s.sample(stream, order));
  }
  return out;
}

// Upper 1% point of chi-square with k degrees of freedom (Wilson-Hilferty).
double chi_square_99(double k) {
  const double z = 2.3263478740408408;
  const double a = 2.0 / (9.0 * k);
  return k * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
}

}  // namespace

TEST_CASE("product state readings are uncorrelated") {
  const SpatialGrid sys(-10.0, 10.0, 128);
  const Pointer ptr(SpatialGrid(-8.0, 8.0, 128), 1.0);
  const JointSampler s(prepare_joint(gaussian_packet(sys, 0.5, 1.5, 1.0), ptr));
  const std::size_t n = 100000;
  CHECK(std::abs(correlation(draw(s, n, 7))) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("strong position coupling makes o follow g f") {
  const SpatialGrid sys(-10.0, 10.0, 128);
  const Pointer ptr(SpatialGrid(-40.0, 40.0, 512), 0.5);
  const double g = 4.0;
  const auto joint = impulsive_couple(prepare_joint(gaussian_packet(sys, 0.0, 1.5, 0.0), ptr),
                                      LinearOperator::position(), g, kNatural);
  const auto pairs = draw(JointSampler(joint), 20000, 8);
  CHECK(correlation(pairs) > 0.99);
  double resid = 0.0;
  for (const auto& p : pairs) resid += (p.o - g * p.f) * (p.o - g * p.f);
  CHECK(std::sqrt(resid / pairs.size()) < 1.0);
}

TEST_CASE("sampling is deterministic for a fixed seed") {
  const SpatialGrid sys(-10.0, 10.0, 64);
  const Pointer ptr(SpatialGrid(-8.0, 8.0, 64), 1.0);
  const JointSampler s(prepare_joint(gaussian_packet(sys, 0.0, 1.0, 2.0), ptr));
  const auto a = draw(s, 1000, 99);
  const auto b = draw(s, 1000, 99);
  for (std::size_t r = 0; r < a.size(); ++r) {
    CHECK(a[r].o == b[r].o);
    CHECK(a[r].f == b[r].f);
  }
  // a run's draw does not depend on how many runs precede it
  RandomStream lone(99, 500);
  const auto single = s.sample(lone);
  CHECK(single.o == a[500].o);
  CHECK(single.f == a[500].f);
}

TEST_CASE("reading order does not change the joint distribution") {
  const SpatialGrid sys(-10.0, 10.0, 128);
  const Pointer ptr(SpatialGrid(-12.0, 12.0, 128), 1.0);
  const auto joint = impulsive_couple(prepare_joint(gaussian_packet(sys, 0.0, 1.2, 1.0), ptr),
                                      LinearOperator::velocity() + LinearOperator::position(), 1.0, kNatural);
  const JointSampler s(joint);
  const std::size_t n = 50000, side = 6;
  // equal-probability-ish bins from the joint draw's own quantiles would add
  // noise; fixed rectangles over the bulk are enough
  auto histogram = [&](const std::vector<PointerReading>& pairs) {
    std::array<double, side * side> h{};
    for (const auto& p : pairs) {
      const int a = std::clamp(static_cast<int>(std::floor((p.f + 3.0) / 1.0)), 0, int(side) - 1);
      const int b = std::clamp(static_cast<int>(std::floor((p.o + 3.0) / 1.0)), 0, int(side) - 1);
      h[a * side + b] += 1.0;
    }
    return h;
  };
  const auto ref = histogram(draw(s, n, 1, SamplingOrder::Joint));
  for (auto order : {SamplingOrder::SystemFirst, SamplingOrder::PointerFirst}) {
    const auto other = histogram(draw(s, n, 2, order));
    double chi = 0.0;
    std::size_t cells = 0;
    for (std::size_t c = 0; c < ref.size(); ++c) {
      const double t = ref[c] + other[c];
      if (t == 0.0) continue;
      chi += (ref[c] - other[c]) * (ref[c] - other[c]) / t;
      ++cells;
    }
    MESSAGE("chi-square " << chi << " on " << cells - 1 << " dof");
    CHECK(chi < chi_square_99(static_cast<double>(cells - 1)));
  }
}

TEST_CASE("column draws follow the conditional pointer density") {
  const SpatialGrid sys(-10.0, 10.0, 64);
  const Pointer ptr(SpatialGrid(-16.0, 16.0, 128), 1.0);
  const double g = 2.0, x = 1.5625;
  const auto joint = impulsive_couple(prepare_joint(gaussian_packet(sys, 0.0, 2.0, 0.0), ptr),
                                      LinearOperator::position(), g, kNatural);
  const JointSampler s(joint);
  double mean = 0.0;
  const std::size_t n = 20000;
  for (std::size_t r = 0; r < n; ++r) {
    RandomStream stream(3, r);
    mean += ptr.grid().x(s.sample_column(x, stream));
  }
  mean /= n;
  CHECK(std::abs(mean - g * sys.x(sys.nearest_index(x))) < 4.0 / std::sqrt(static_cast<double>(n)));
}
