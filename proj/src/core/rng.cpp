#include "pilotwave/rng.hpp"

namespace pilotwave {

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

}  // namespace pilotwave
