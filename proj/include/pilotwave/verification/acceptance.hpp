#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "pilotwave/report.hpp"

namespace pilotwave::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<ReportEntry> checks;  // includes the runtime limit
  double seconds = 0.0;
  double runtime_limit = 0.0;       // 0: none

  bool passed() const { return !checks.empty() && all_pass(checks); }
};

struct SuiteOptions {
  std::filesystem::path output_dir = "output/check";
  std::uint64_t seed = 1;
  /// Criterion 11 reruns 1-10 into a second directory and compares bytes.
  bool determinism = true;
};

/// Criteria 1-10 write into output_dir/criterion_NN. Each result is streamed
/// to `log` as it completes, one line per criterion.
std::vector<CriterionResult> run_suite(const SuiteOptions& options, std::ostream& log);

/// "[PASS] 03 title (0.01 s)" followed by failing checks, if any.
std::string summary_line(const CriterionResult& r);

/// Files under `a` and `b` that differ (manifest environment blocks ignored),
/// plus files present on one side only. Paths relative to the roots.
std::vector<std::string> differing_files(const std::filesystem::path& a, const std::filesystem::path& b);

}  // namespace pilotwave::acceptance
