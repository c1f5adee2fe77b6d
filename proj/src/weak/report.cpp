#include "pilotwave/weak.hpp"

namespace pilotwave {

std::vector<ReportEntry> report_entries(const CounterexampleReport& r, double tolerance) {
  return {at_most("<V>_w", r.velocity.value, r.velocity_deviation, tolerance),
          at_most("<X>_w", r.position.value, r.position_deviation, tolerance),
          at_most("<V + X>_w", r.sum.value, r.sum_deviation, tolerance)};
}

std::vector<ReportEntry> report_entries(const SumRuleReport& r, const std::string& label,
                                        double precondition_tolerance, double tolerance) {
  return {at_most(label + " P eigen-residual", r.p, r.p_residual, precondition_tolerance),
          at_most(label + " Q eigen-residual", r.q, r.q_residual, precondition_tolerance),
          at_most(label + " <P+Q>_w", r.sum_weak.value, r.residual, tolerance)};
}

}  // namespace pilotwave
