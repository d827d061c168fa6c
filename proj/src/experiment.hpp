#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace dspec {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
  int workers = 1;
  bool timings = false;  // fill runtime_ms; off by default so outputs are byte-stable
};

struct Artifact {
  std::string name;
  std::string content;
};

/// Exit status follows the CLI: 0 done, 2 conclusive disagreement between
/// the two sides of a crosscheck. Errors are thrown, not returned.
struct RunResult {
  int exit_code = 0;
  std::vector<Artifact> files;  // summary.json last
  Json summary;
};

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

/// Writes every artifact into dir (created if missing).
void write_artifacts(const RunResult& r, const std::string& dir);

struct Preset {
  std::string name;
  std::string text;  // JSON
};

/// Presets compiled into the library, sorted by name.
const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);

}  // namespace dspec
