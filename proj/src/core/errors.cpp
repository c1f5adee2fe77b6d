#include "pilotwave/errors.hpp"

#include <sstream>

namespace pilotwave {

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::ostringstream os;
  os << "invalid configuration (" << violations.size() << " violation"
     << (violations.size() == 1 ? "" : "s") << ")";
  for (const auto& v : violations) os << "\n  - " << v;
  return os.str();
}

}  // namespace

TimeMismatch::TimeMismatch(double expected, double actual)
    : Error("time mismatch: expected t=" + std::to_string(expected) + ", got t=" +
            std::to_string(actual)),
      expected_(expected),
      actual_(actual) {}

VanishingOverlap::VanishingOverlap(double overlap)
    : Error("weak value undefined: |<psi_f|psi_i>| = " + std::to_string(overlap)),
      overlap_(overlap) {}

PreconditionViolated::PreconditionViolated(const std::string& what, double residual)
    : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

}  // namespace pilotwave
