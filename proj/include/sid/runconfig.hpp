#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sid/adaptive.hpp"
#include "sid/identify.hpp"
#include "sid/signals.hpp"
#include "sid/simulate.hpp"

namespace sid {

struct ExcitationConfig {
  std::string kind = "white_noise";  // white_noise | quake | impulse | file
  double rms = 1.0;                  // white_noise
  QuakeParams quake;                 // quake
  double amplitude = 1.0;            // impulse
  double at = 0.0;                   // impulse
  std::string path;                  // file (CSV, first channel)
};

struct NoiseConfig {
  double rms = 0.01;  // added to ground acceleration and outputs alike
};

struct ScenarioConfig {
  StructureSpec structure;
  std::string units = "t,kN/m,kN*s/m,m,s";
  std::vector<Sensor> sensors;
  ExcitationConfig excitation;
  double duration = 60.0;
  double ts = 0.02;
  int oversample = 20;
  NoiseConfig noise;
  DamageSchedule schedule;
  std::uint64_t seed = 1;
};

struct AdaptationSection {
  bool enabled = false;
  AdaptationConfig cfg;
};

struct RunConfig {
  ScenarioConfig scenario;
  FilterConfig filter;
  AdaptationSection adaptation;
  std::string output_dir = "out";
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);
std::string dump_run_config(const RunConfig& cfg);  // canonical (sorted keys)

// FNV-1a over the canonical dump; stable across platforms for identical
// configs, so output files can be traced back to the exact settings.
std::uint64_t config_hash(const RunConfig& cfg);

// "# config=<hex> seed=<n> version=<v>" comment stamped on generated files.
std::string manifest_line(const RunConfig& cfg);

// Resolve cfg.output_dir against the SID_OUTPUT_ROOT environment variable
// (absolute paths win; relative paths land under the root when it is set).
std::string resolve_output_dir(const RunConfig& cfg);

}  // namespace sid
