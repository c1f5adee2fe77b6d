#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pilotwave/report.hpp"

namespace pilotwave::runner {

/// Summary of one run. Everything except the `environment` block (wall
/// clock, output location) is a deterministic function of the config.
struct RunManifest {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string config_json;
  std::vector<ReportEntry> checks;
  std::vector<std::pair<std::string, double>> observations;  // reported, not judged
  std::vector<std::string> outputs;                          // file names, in write order

  std::string started_utc;
  double elapsed_seconds = 0.0;
  std::string output_dir;

  bool passed() const { return all_pass(checks); }
};

std::string artifact_version();

/// JSON text of the manifest.
std::string manifest_json(const RunManifest& manifest);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

/// Manifest text with the `environment` block removed, for comparing runs.
std::string without_environment(const std::string& manifest_text);

/// Current UTC time as ISO 8601.
std::string utc_now();

}  // namespace pilotwave::runner
