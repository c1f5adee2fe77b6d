#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace pilotwave {

/// hbar and particle mass. Natural units by default.
struct PhysicalConstants {
  double hbar = 1.0;
  double mass = 1.0;

  /// Throws InvalidArgument unless both are finite and positive.
  void validate() const;
};

/// Uniform periodic 1D grid on [x_min, x_max); x_max is identified with x_min.
///
/// Coordinates are x_i = x_min + i*dx with dx = (x_max - x_min)/n. Wavenumbers
/// follow FFT ordering: k_j = 2*pi*s(j)/L with s(j) = j for j < n/2 and j - n
/// otherwise, so the Nyquist mode carries the negative sign.
class SpatialGrid {
 public:
  SpatialGrid(double x_min, double x_max, std::size_t n_points);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double length() const { return x_max_ - x_min_; }
  double dx() const { return dx_; }
  std::size_t size() const { return n_; }

  double x(std::size_t i) const { return (*coords_)[i]; }
  std::span<const double> coordinates() const { return *coords_; }
  std::span<const double> wavenumbers() const { return *k_; }

  /// Magnitude of the Nyquist wavenumber, pi/dx.
  double k_max() const;

  /// Wavenumber of the representable plane wave with the given signed index.
  double wavenumber_of(long index) const;

  /// Maps x into [x_min, x_max).
  double wrap(double x) const;

  /// Index of the grid point closest to x under periodic identification.
  std::size_t nearest_index(double x) const;

  bool operator==(const SpatialGrid& other) const;

 private:
  double x_min_;
  double x_max_;
  double dx_;
  std::size_t n_;
  std::shared_ptr<const std::vector<double>> coords_;
  std::shared_ptr<const std::vector<double>> k_;
};

bool is_power_of_two(std::size_t n);

/// Throws GridMismatch with `context` if the grids differ.
void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* context);

}  // namespace pilotwave
