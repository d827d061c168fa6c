#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "complexity.hpp"
#include "equicont.hpp"
#include "json.hpp"
#include "spectrum.hpp"

namespace dspec {

using Json = nlohmann::json;

enum class Pipeline { check_tempered, profile_complexity, ap_test, equicontinuity, verify_theorem };
const char* to_string(Pipeline p);
std::optional<Pipeline> pipeline_from_verb(std::string_view verb);

enum class Theorem { discrete_spectrum, almost_periodic, metric_robustness, equicontinuity };
const char* to_string(Theorem t);  // "discrete-spectrum", "almost-periodic", "metric-robustness", "equicontinuity"

struct TemperedSettings {
  std::int64_t n_max = 64;
  std::optional<double> constant;  // also extract a tempered subsequence
};

/// Validated experiment. Every object referenced by the config is built
/// here; violations throw ErrorKind::config with the JSON path first.
struct ExperimentConfig {
  Json doc;  // the config as run (seed override applied)
  std::string name;
  Pipeline pipeline = Pipeline::profile_complexity;
  std::optional<Theorem> theorem;
  std::uint64_t seed = 0;

  std::optional<GroupSpec> group;
  std::shared_ptr<const DynamicalSystem> system;
  std::shared_ptr<const FolnerSequence> folner;
  std::vector<Semimetric> semimetrics;
  std::optional<Observable> observable;

  std::vector<std::int64_t> n_grid;
  std::vector<double> eps_grid;
  std::size_t samples = 2000;
  std::optional<Ratio> exact_words_p;  // fill the exact column on the word space

  ComplexityOptions complexity;
  BoundednessThresholds thresholds;
  TemperedSettings tempered;
  ApOptions ap;
  EquicontSettings equicont;

  void set_workers(int workers);
};

/// `verb` must match "pipeline" when both are present.
ExperimentConfig parse_config(const Json& doc, std::optional<std::uint64_t> seed_override = {},
                              std::optional<Pipeline> verb = {});
Json parse_json_text(std::string_view text, const std::string& origin);

/// SHA-256 of the sorted-key compact dump, "workers" excluded.
std::string config_sha256(const Json& doc);

}  // namespace dspec
