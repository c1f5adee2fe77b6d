#include "pilotwave/cells.hpp"

#include <algorithm>
#include <cmath>

#include "pilotwave/errors.hpp"

namespace pilotwave {

std::size_t bin_count(const SpatialGrid& grid, double bin_width) {
  if (!(bin_width > 0.0)) throw InvalidArgument("bin width must be > 0");
  const double ratio = grid.length() / bin_width;
  // tolerate widths that divide L up to rounding
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) < 1e-9 * std::max(1.0, ratio)) {
    return static_cast<std::size_t>(rounded);
  }
  return static_cast<std::size_t>(std::ceil(ratio));
}

std::size_t bin_of(const SpatialGrid& grid, double x, double bin_width) {
  const std::size_t n = bin_count(grid, bin_width);
  const auto b = static_cast<std::size_t>(std::floor((grid.wrap(x) - grid.x_min()) / bin_width));
  return std::min(b, n - 1);
}

std::vector<double> cells_to_bins(const SpatialGrid& grid, std::span<const double> cell_totals,
                                  double bin_width) {
  if (cell_totals.size() != grid.size()) throw GridMismatch("cells_to_bins: size mismatch");
  const std::size_t n_bins = bin_count(grid, bin_width);
  std::vector<double> bins(n_bins, 0.0);
  const double dx = grid.dx();

  auto deposit = [&](double lo, double hi, double density) {
    // [lo, hi) lies inside [x_min, x_max)
    auto b = std::min(static_cast<std::size_t>(std::max(0.0, std::floor((lo - grid.x_min()) / bin_width))),
                      n_bins - 1);
    double a = lo;
    for (; a < hi && b < n_bins; ++b) {
      const double bin_hi =
          b + 1 == n_bins ? grid.x_max() : grid.x_min() + static_cast<double>(b + 1) * bin_width;
      const double end = std::min(hi, bin_hi);
      if (end > a) {
        bins[b] += density * (end - a);
        a = end;
      }
    }
  };

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double density = cell_totals[i] / dx;
    const double lo = grid.x(i) - 0.5 * dx;
    const double hi = grid.x(i) + 0.5 * dx;
    if (lo < grid.x_min()) {
      deposit(lo + grid.length(), grid.x_max(), density);
      deposit(grid.x_min(), hi, density);
    } else if (hi > grid.x_max()) {
      deposit(lo, grid.x_max(), density);
      deposit(grid.x_min(), hi - grid.length(), density);
    } else {
      deposit(lo, hi, density);
    }
  }
  return bins;
}

}  // namespace pilotwave
