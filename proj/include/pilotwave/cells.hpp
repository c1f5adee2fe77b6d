#pragma once

#include <span>
#include <vector>

#include "pilotwave/grid.hpp"

namespace pilotwave {

// Cell model of a grid density: grid point i owns [x_i - dx/2, x_i + dx/2)
// with uniform density inside. Sampling, histogram references and bin
// averages all use this model, so their discretizations agree.

/// Number of bins of the given width covering [x_min, x_max); the last bin
/// may be partial.
std::size_t bin_count(const SpatialGrid& grid, double bin_width);

/// Distributes per-cell totals over bins [x_min + b w, x_min + (b+1) w) by
/// overlap length, wrapping the first cell's lower half to the end of the box.
std::vector<double> cells_to_bins(const SpatialGrid& grid, std::span<const double> cell_totals,
                                  double bin_width);

/// Bin index of a wrapped position.
std::size_t bin_of(const SpatialGrid& grid, double x, double bin_width);

}  // namespace pilotwave
