#include "pilotwave/potential.hpp"

#include <cmath>
#include <sstream>

#include "pilotwave/errors.hpp"

namespace pilotwave {

Potential Potential::free() { return Potential(Free{}); }

Potential Potential::harmonic(double omega, double x_center) {
  if (!(std::isfinite(omega) && omega > 0.0)) throw InvalidArgument("harmonic omega must be > 0");
  if (!std::isfinite(x_center)) throw InvalidArgument("harmonic center must be finite");
  return Potential(Harmonic{omega, x_center});
}

Potential Potential::gaussian_barrier(double height, double width, double x_center) {
  if (!std::isfinite(height)) throw InvalidArgument("barrier height must be finite");
  if (!(std::isfinite(width) && width > 0.0)) throw InvalidArgument("barrier width must be > 0");
  if (!std::isfinite(x_center)) throw InvalidArgument("barrier center must be finite");
  return Potential(GaussianBarrier{height, width, x_center});
}

Potential Potential::custom(std::vector<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("custom potential has non-finite values");
  }
  return Potential(Custom{std::move(values)});
}

std::string Potential::label() const {
  std::ostringstream os;
  std::visit(
      [&os](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Free>) {
          os << "free";
        } else if constexpr (std::is_same_v<T, Harmonic>) {
          os << "harmonic(omega=" << k.omega << ", x_c=" << k.x_center << ")";
        } else if constexpr (std::is_same_v<T, GaussianBarrier>) {
          os << "gaussian_barrier(height=" << k.height << ", width=" << k.width
             << ", x_c=" << k.x_center << ")";
        } else {
          os << "custom(" << k.values.size() << " values)";
        }
      },
      kind_);
  return os.str();
}

std::vector<double> Potential::tabulate(const SpatialGrid& grid,
                                        const PhysicalConstants& constants) const {
  std::vector<double> v(grid.size(), 0.0);
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Harmonic>) {
          const double c = 0.5 * constants.mass * k.omega * k.omega;
          for (std::size_t i = 0; i < v.size(); ++i) {
            const double d = grid.x(i) - k.x_center;
            v[i] = c * d * d;
          }
        } else if constexpr (std::is_same_v<T, GaussianBarrier>) {
          for (std::size_t i = 0; i < v.size(); ++i) {
            const double d = (grid.x(i) - k.x_center) / k.width;
            v[i] = k.height * std::exp(-0.5 * d * d);
          }
        } else if constexpr (std::is_same_v<T, Custom>) {
          if (k.values.size() != grid.size()) {
            throw GridMismatch("custom potential tabulated on a different grid size");
          }
          v = k.values;
        }
      },
      kind_);
  return v;
}

}  // namespace pilotwave
