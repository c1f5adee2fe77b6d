#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pilotwave {

enum class Relation { Below, Above, Equal };

/// "<", ">" or "==".
const char* relation_symbol(Relation r);

/// One named check: `value` is the computed quantity, `residual` is compared
/// with `tolerance` by `relation`. NaN never passes.
struct ReportEntry {
  std::string label;
  double value;
  double residual;
  double tolerance;
  bool pass;
  Relation relation = Relation::Below;
};

ReportEntry at_most(std::string label, double value, double residual, double tolerance);
ReportEntry at_least(std::string label, double value, double threshold);
/// Passes only for residual == 0.
ReportEntry exactly_zero(std::string label, double value, double residual);

bool all_pass(const std::vector<ReportEntry>& entries);

/// Array of {label, value, residual, tolerance, relation, pass}; non-finite
/// numbers are written as null.
void write_report_json(const std::vector<ReportEntry>& entries, std::ostream& out);

}  // namespace pilotwave
