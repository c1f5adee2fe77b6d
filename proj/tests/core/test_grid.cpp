#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pilotwave/errors.hpp"
#include "pilotwave/grid.hpp"

using namespace pilotwave;

TEST_CASE("grid geometry and FFT-ordered wavenumbers") {
  const SpatialGrid g(-2.0, 2.0, 8);
  CHECK(g.dx() == doctest::Approx(0.5));
  CHECK(g.x(0) == -2.0);
  CHECK(g.x(7) == doctest::Approx(1.5));

  const double k0 = 2.0 * std::numbers::pi / 4.0;
  const double expected[] = {0, 1, 2, 3, -4, -3, -2, -1};
  for (std::size_t j = 0; j < 8; ++j) CHECK(g.wavenumbers()[j] == doctest::Approx(expected[j] * k0));

  // symmetric about zero except the Nyquist mode
  double sum = 0.0;
  for (double k : g.wavenumbers()) sum += k;
  CHECK(sum == doctest::Approx(-4.0 * k0));
}

TEST_CASE("grid rejects invalid geometry") {
  CHECK_THROWS_AS(SpatialGrid(0.0, 1.0, 1000), InvalidArgument);
  CHECK_THROWS_AS(SpatialGrid(0.0, 1.0, 0), InvalidArgument);
  CHECK_THROWS_AS(SpatialGrid(1.0, 1.0, 16), InvalidArgument);
  CHECK_THROWS_AS(SpatialGrid(0.0, NAN, 16), InvalidArgument);
}

TEST_CASE("periodic wrap and nearest index") {
  const SpatialGrid g(0.0, 1.0, 16);
  CHECK(g.wrap(1.25) == doctest::Approx(0.25));
  CHECK(g.wrap(-0.25) == doctest::Approx(0.75));
  CHECK(g.wrap(1.0) == 0.0);
  CHECK(g.nearest_index(0.99) == 0);
  CHECK(g.nearest_index(0.5) == 8);
  CHECK(g.nearest_index(-1.0 / 16.0) == 15);
}

TEST_CASE("physical constants validation") {
  CHECK_NOTHROW(PhysicalConstants{}.validate());
  CHECK_THROWS_AS((PhysicalConstants{0.0, 1.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((PhysicalConstants{1.0, -2.0}.validate()), InvalidArgument);
}
