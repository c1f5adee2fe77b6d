#include "pilotwave/report.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace pilotwave {

namespace {

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace

const char* relation_symbol(Relation r) {
  switch (r) {
    case Relation::Above: return ">";
    case Relation::Equal: return "==";
    case Relation::Below: break;
  }
  return "<";
}

ReportEntry at_most(std::string label, double value, double residual, double tolerance) {
  return {std::move(label), value, residual, tolerance, residual < tolerance, Relation::Below};
}

ReportEntry at_least(std::string label, double value, double threshold) {
  return {std::move(label), value, value, threshold, value > threshold, Relation::Above};
}

ReportEntry exactly_zero(std::string label, double value, double residual) {
  return {std::move(label), value, residual, 0.0, residual == 0.0, Relation::Equal};
}

bool all_pass(const std::vector<ReportEntry>& entries) {
  return std::all_of(entries.begin(), entries.end(), [](const ReportEntry& e) { return e.pass; });
}

void write_report_json(const std::vector<ReportEntry>& entries, std::ostream& out) {
  auto doc = nlohmann::json::array();
  for (const auto& e : entries) {
    doc.push_back({{"label", e.label},
                   {"value", number(e.value)},
                   {"residual", number(e.residual)},
                   {"tolerance", e.tolerance},
                   {"relation", relation_symbol(e.relation)},
                   {"pass", e.pass}});
  }
  out << doc.dump(2) << '\n';
}

}  // namespace pilotwave
