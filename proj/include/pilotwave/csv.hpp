#pragma once

#include <ostream>
#include <string>

namespace pilotwave {

/// Shortest round-trip decimal form ("nan"/"inf" for non-finite values).
/// Locale independent, so CSV output is byte-stable.
std::string format_number(double value);

}  // namespace pilotwave
