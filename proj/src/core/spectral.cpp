#include "pilotwave/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "pilotwave/errors.hpp"

namespace pilotwave::spectral {

namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

enum class Shape { Line, Plane, Rows };

// (shape, rows, cols, sign)
using PlanKey = std::tuple<Shape, std::size_t, std::size_t, int>;

fftw_plan plan_for(Shape shape, std::size_t rows, std::size_t cols, int sign) {
  static std::mutex mutex;
  static std::map<PlanKey, PlanHandle> cache;

  std::lock_guard lock(mutex);
  const PlanKey key{shape, rows, cols, sign};
  if (auto it = cache.find(key); it != cache.end()) return it->second.get();

  const std::size_t total = rows * cols;
  fftw_complex* in = fftw_alloc_complex(total);
  fftw_complex* out = fftw_alloc_complex(total);
  // ESTIMATE keeps planning deterministic; UNALIGNED lets any std::vector
  // buffer be executed without changing the chosen codelets.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan plan = nullptr;
  switch (shape) {
    case Shape::Line:
      plan = fftw_plan_dft_1d(static_cast<int>(cols), in, out, sign, flags);
      break;
    case Shape::Plane:
      plan = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), in, out, sign,
                              flags);
      break;
    case Shape::Rows: {
      const int n = static_cast<int>(cols);
      plan = fftw_plan_many_dft(1, &n, static_cast<int>(rows), in, nullptr, 1, n, out, nullptr, 1,
                                n, sign, flags);
      break;
    }
  }
  fftw_free(in);
  fftw_free(out);
  if (plan == nullptr) throw Error("FFTW failed to create a plan");
  return cache.emplace(key, PlanHandle(plan)).first->second.get();
}

std::vector<cplx> execute(Shape shape, std::span<const cplx> in, std::size_t rows,
                          std::size_t cols, int sign) {
  if (in.size() != rows * cols) throw InvalidArgument("FFT input size does not match shape");
  fftw_plan plan = plan_for(shape, rows, cols, sign);
  std::vector<cplx> src(in.begin(), in.end());
  std::vector<cplx> out(in.size());
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(src.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  if (sign == FFTW_BACKWARD) {
    const double scale = 1.0 / static_cast<double>(shape == Shape::Plane ? rows * cols : cols);
    for (auto& v : out) v *= scale;
  }
  return out;
}

}  // namespace

std::vector<cplx> forward(std::span<const cplx> in) {
  return execute(Shape::Line, in, 1, in.size(), FFTW_FORWARD);
}

std::vector<cplx> inverse(std::span<const cplx> in) {
  return execute(Shape::Line, in, 1, in.size(), FFTW_BACKWARD);
}

std::vector<cplx> forward_2d(std::span<const cplx> in, std::size_t rows, std::size_t cols) {
  return execute(Shape::Plane, in, rows, cols, FFTW_FORWARD);
}

std::vector<cplx> inverse_2d(std::span<const cplx> in, std::size_t rows, std::size_t cols) {
  return execute(Shape::Plane, in, rows, cols, FFTW_BACKWARD);
}

std::vector<cplx> forward_rows(std::span<const cplx> in, std::size_t rows, std::size_t cols) {
  return execute(Shape::Rows, in, rows, cols, FFTW_FORWARD);
}

std::vector<cplx> inverse_rows(std::span<const cplx> in, std::size_t rows, std::size_t cols) {
  return execute(Shape::Rows, in, rows, cols, FFTW_BACKWARD);
}

std::vector<cplx> apply_symbol(std::span<const cplx> f, std::span<const double> symbol) {
  if (f.size() != symbol.size()) throw InvalidArgument("symbol size does not match input");
  auto hat = forward(f);
  for (std::size_t j = 0; j < hat.size(); ++j) hat[j] *= symbol[j];
  return inverse(hat);
}

std::vector<cplx> derivative(const SpatialGrid& grid, std::span<const cplx> f, int order) {
  if (f.size() != grid.size()) throw GridMismatch("derivative: array size differs from grid");
  auto hat = forward(f);
  const auto k = grid.wavenumbers();
  for (std::size_t j = 0; j < hat.size(); ++j) {
    cplx factor(1.0, 0.0);
    for (int p = 0; p < order; ++p) factor *= cplx(0.0, k[j]);
    hat[j] *= factor;
  }
  return inverse(hat);
}

std::vector<double> second_derivative(const SpatialGrid& grid, std::span<const double> f) {
  std::vector<cplx> c(f.begin(), f.end());
  const auto d = derivative(grid, c, 2);
  std::vector<double> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i].real();
  return out;
}

}  // namespace pilotwave::spectral
