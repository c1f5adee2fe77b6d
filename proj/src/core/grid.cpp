#include "pilotwave/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pilotwave/errors.hpp"

namespace pilotwave {

void PhysicalConstants::validate() const {
  if (!(std::isfinite(hbar) && hbar > 0.0)) throw InvalidArgument("hbar must be positive");
  if (!(std::isfinite(mass) && mass > 0.0)) throw InvalidArgument("mass must be positive");
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

SpatialGrid::SpatialGrid(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    throw InvalidArgument("grid requires finite x_min < x_max");
  }
  if (!is_power_of_two(n_points) || n_points < 2) {
    throw InvalidArgument("grid n_points must be a power of two >= 2, got " +
                          std::to_string(n_points));
  }
  dx_ = (x_max - x_min) / static_cast<double>(n_points);

  auto coords = std::make_shared<std::vector<double>>(n_);
  auto k = std::make_shared<std::vector<double>>(n_);
  const double k0 = 2.0 * std::numbers::pi / (x_max - x_min);
  const long n = static_cast<long>(n_);
  for (long j = 0; j < n; ++j) {
    (*coords)[j] = x_min + static_cast<double>(j) * dx_;
    const long s = j < n / 2 ? j : j - n;
    (*k)[j] = k0 * static_cast<double>(s);
  }
  coords_ = std::move(coords);
  k_ = std::move(k);
}

double SpatialGrid::k_max() const { return std::numbers::pi / dx_; }

double SpatialGrid::wavenumber_of(long index) const {
  return 2.0 * std::numbers::pi * static_cast<double>(index) / length();
}

double SpatialGrid::wrap(double x) const {
  const double L = length();
  double w = x - L * std::floor((x - x_min_) / L);
  if (w >= x_max_) w -= L;
  if (w < x_min_) w = x_min_;
  return w;
}

std::size_t SpatialGrid::nearest_index(double x) const {
  const double s = std::round((wrap(x) - x_min_) / dx_);
  return static_cast<std::size_t>(s) % n_;
}

bool SpatialGrid::operator==(const SpatialGrid& other) const {
  return x_min_ == other.x_min_ && x_max_ == other.x_max_ && n_ == other.n_;
}

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* context) {
  if (!(a == b)) throw GridMismatch(std::string(context) + ": grids differ");
}

}  // namespace pilotwave
