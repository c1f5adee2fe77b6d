#pragma once

#include <string>
#include <variant>
#include <vector>

#include "pilotwave/grid.hpp"

namespace pilotwave {

/// Classical potential V(x). Time independent.
class Potential {
 public:
  struct Free {};
  struct Harmonic {
    double omega;
    double x_center;
  };
  struct GaussianBarrier {
    double height;
    double width;
    double x_center;
  };
  struct Custom {
    std::vector<double> values;
  };
  using Kind = std::variant<Free, Harmonic, GaussianBarrier, Custom>;

  static Potential free();
  static Potential harmonic(double omega, double x_center = 0.0);
  static Potential gaussian_barrier(double height, double width, double x_center = 0.0);
  /// Values tabulated on the grid the potential will be used with.
  static Potential custom(std::vector<double> values);

  const Kind& kind() const { return kind_; }
  bool is_free() const { return std::holds_alternative<Free>(kind_); }
  std::string label() const;

  /// V(x_i). Harmonic uses 1/2 m omega^2 (x - x_c)^2 with the unwrapped x.
  std::vector<double> tabulate(const SpatialGrid& grid, const PhysicalConstants& constants) const;

 private:
  explicit Potential(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

}  // namespace pilotwave
