#include "pilotwave/runner/manifest.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "pilotwave/errors.hpp"

#ifndef PILOTWAVE_VERSION
#define PILOTWAVE_VERSION "0.0.0"
#endif

namespace pilotwave::runner {

using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(); }

}  // namespace

std::string artifact_version() { return PILOTWAVE_VERSION; }

std::string manifest_json(const RunManifest& m) {
  json config = json::parse(m.config_json);
  config.erase("output_dir");

  json checks = json::array();
  for (const auto& c : m.checks) {
    checks.push_back({{"label", c.label},
                      {"value", number(c.value)},
                      {"residual", number(c.residual)},
                      {"tolerance", c.tolerance},
                      {"relation", relation_symbol(c.relation)},
                      {"pass", c.pass}});
  }
  json observations = json::object();
  for (const auto& [name, value] : m.observations) observations[name] = number(value);

  json doc = {{"artifact", "pilotwave"},
              {"version", artifact_version()},
              {"scenario", m.scenario},
              {"seed", m.seed},
              {"passed", m.passed()},
              {"checks", checks},
              {"observations", observations},
              {"outputs", m.outputs},
              {"config", config},
              {"environment",
               {{"started_utc", m.started_utc},
                {"elapsed_seconds", m.elapsed_seconds},
                {"output_dir", m.output_dir}}}};
  return doc.dump(2) + "\n";
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOFailure("cannot write " + path.string());
  out << manifest_json(manifest);
  if (!out) throw IOFailure("failed writing " + path.string());
}

std::string without_environment(const std::string& manifest_text) {
  json doc = json::parse(manifest_text);
  doc.erase("environment");
  return doc.dump(2);
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace pilotwave::runner
