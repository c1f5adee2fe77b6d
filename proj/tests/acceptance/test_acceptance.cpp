#include <algorithm>
#include <iostream>

#include "pilotwave/verification/acceptance.hpp"

// One line per criterion; exit status 1 if any fails.
int main(int argc, char** argv) {
  pilotwave::acceptance::SuiteOptions options;
  options.output_dir = argc > 1 ? argv[1] : "acceptance_output";
  const auto results = pilotwave::acceptance::run_suite(options, std::cout);
  const bool ok = results.size() == 11 &&
                  std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed(); });
  std::cout << (ok ? "all 11 criteria passed" : "acceptance failed") << std::endl;
  return ok ? 0 : 1;
}
