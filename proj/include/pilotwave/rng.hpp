#pragma once

#include <cstdint>
#include <random>

namespace pilotwave {

/// Independent random stream for one trajectory or protocol run. The engine
/// is seeded with seed XOR index, so a stream depends only on its own index
/// and results do not depend on execution order.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t index) : engine_(seed ^ index) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::mt19937_64 engine_;
};

}  // namespace pilotwave
