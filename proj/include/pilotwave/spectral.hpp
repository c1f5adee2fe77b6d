#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "pilotwave/grid.hpp"

namespace pilotwave {

using cplx = std::complex<double>;

namespace spectral {

// Thin FFTW front end. Plans are created once per shape and shared; execution
// is reentrant. The forward transform is unnormalized, the inverse carries 1/n.

std::vector<cplx> forward(std::span<const cplx> in);
std::vector<cplx> inverse(std::span<const cplx> in);

/// 2D transforms of a row-major rows x cols array.
std::vector<cplx> forward_2d(std::span<const cplx> in, std::size_t rows, std::size_t cols);
std::vector<cplx> inverse_2d(std::span<const cplx> in, std::size_t rows, std::size_t cols);

/// Transforms along the column index only (each row independently).
std::vector<cplx> forward_rows(std::span<const cplx> in, std::size_t rows, std::size_t cols);
std::vector<cplx> inverse_rows(std::span<const cplx> in, std::size_t rows, std::size_t cols);

/// IFFT(symbol * FFT(f)); symbol indexed in FFT order.
std::vector<cplx> apply_symbol(std::span<const cplx> f, std::span<const double> symbol);

/// d^order f / dx^order on the periodic grid.
std::vector<cplx> derivative(const SpatialGrid& grid, std::span<const cplx> f, int order);

/// Second derivative of a real periodic function.
std::vector<double> second_derivative(const SpatialGrid& grid, std::span<const double> f);

}  // namespace spectral
}  // namespace pilotwave
