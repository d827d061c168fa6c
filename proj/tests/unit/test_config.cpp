#include <string>

#include "config.hpp"
#include "doctest.h"
#include "error.hpp"
#include "experiment.hpp"

using namespace dspec;

namespace {

Json base_doc() {
  return Json::parse(R"({
    "pipeline": "profile-complexity",
    "seed": 9,
    "system": {"kind": "rotation", "angles": [[0.6180339887498949]]},
    "n_grid": [4, 8],
    "eps_grid": [0.2]
  })");
}

// message of the config error raised by doc, "" if none
std::string config_error(const Json& doc) {
  try {
    parse_config(doc);
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::config);
    return e.what();
  }
  return "";
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

}  // namespace

TEST_CASE("valid config builds every object") {
  const auto c = parse_config(base_doc());
  CHECK(c.pipeline == Pipeline::profile_complexity);
  CHECK(c.seed == 9);
  REQUIRE(c.system);
  CHECK(c.system->space_kind() == SpaceKind::torus);
  REQUIRE(c.semimetrics.size() == 1);
  CHECK(c.semimetrics[0].kind() == Semimetric::Kind::base);
  CHECK(c.folner->set(8)->size() == 8);
}

TEST_CASE("schema violations name the offending path") {
  auto d = base_doc();
  d["eps_grid"] = {-0.1};
  CHECK(starts_with(config_error(d), "$.eps_grid[0]:"));

  d = base_doc();
  d.erase("seed");
  CHECK(starts_with(config_error(d), "$.seed:"));

  d = base_doc();
  d["system"]["angles"][0][0] = 1.5;
  CHECK(starts_with(config_error(d), "$.system.angles[0][0]:"));

  d = base_doc();
  d["systme"] = 1;
  CHECK(starts_with(config_error(d), "$.systme: unknown field"));

  d = base_doc();
  d["n_grid"] = {8, 4};
  CHECK(starts_with(config_error(d), "$.n_grid[1]:"));

  d = base_doc();
  d["semimetric"] = {{"kind", "hamming"}, {"partition", {{"kind", "cylinder"}}}};
  CHECK(starts_with(config_error(d), "$.semimetric.partition.kind:"));

  d = base_doc();
  d["samples"] = 0;
  CHECK(starts_with(config_error(d), "$.samples:"));

  d = base_doc();
  d["pipeline"] = "verify-theorem";
  CHECK(starts_with(config_error(d), "$.theorem:"));
  d["theorem"] = "metric-robustness";
  d["semimetrics"] = {{{"kind", "base"}}, {{"kind", "sum"}}};
  CHECK(to_string(*parse_config(d).theorem) == std::string("metric-robustness"));
  d["theorem"] = "T3-metrics";  // short alias
  CHECK(parse_config(d).theorem == Theorem::metric_robustness);

  d = base_doc();
  d["system"] = {{"kind", "bernoulli"}, {"probabilities", {0.5, 0.5}}};
  d["exact_words"] = {{"p", "1/2"}};
  CHECK(starts_with(config_error(d), "$.exact_words:"));  // base semimetric
  d["exact_words"] = {{"p", "3/2"}};
  CHECK(starts_with(config_error(d), "$.exact_words.p:"));
}

TEST_CASE("verb must match the pipeline") {
  CHECK_NOTHROW(parse_config(base_doc(), std::nullopt, Pipeline::profile_complexity));
  CHECK_THROWS_AS(parse_config(base_doc(), std::nullopt, Pipeline::ap_test), Error);
  auto d = base_doc();
  d.erase("pipeline");
  CHECK(parse_config(d, std::nullopt, Pipeline::profile_complexity).pipeline == Pipeline::profile_complexity);
  CHECK_THROWS_AS(parse_config(d), Error);
}

TEST_CASE("config hash") {
  const auto h = config_sha256(base_doc());
  CHECK(h.size() == 64);
  auto d = base_doc();
  d["workers"] = 8;  // run option, not part of the experiment
  CHECK(config_sha256(d) == h);
  d["seed"] = 10;
  CHECK(config_sha256(d) != h);
  // key order does not matter
  CHECK(config_sha256(Json::parse(R"({"b": 1, "a": 2})")) == config_sha256(Json::parse(R"({"a": 2, "b": 1})")));
  // sha256("{}")
  CHECK(config_sha256(Json::object()) == "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a");
  // seed override lands in the document
  CHECK(parse_config(base_doc(), 10).doc["seed"] == 10);
  CHECK(config_sha256(parse_config(base_doc(), 10).doc) == config_sha256(d));
}

TEST_CASE("every preset parses and matches its file name") {
  REQUIRE(presets().size() >= 10);
  for (const auto& p : presets()) {
    CAPTURE(p.name);
    const auto c = parse_config(parse_json_text(p.text, p.name));
    CHECK(c.name == p.name);
  }
  CHECK(find_preset("rotation-bounded") != nullptr);
  CHECK(find_preset("no-such-preset") == nullptr);
}

TEST_CASE("profile run output") {
  auto d = base_doc();
  d["samples"] = 300;
  const auto c = parse_config(d);
  const auto r = run_experiment(c);
  CHECK(r.exit_code == 0);
  REQUIRE(r.files.size() == 3);
  CHECK(r.files[0].name == "profile.csv");
  CHECK(r.files[1].name == "profile.svg");
  CHECK(r.files[2].name == "summary.json");
  const auto& csv = r.files[0].content;
  CHECK(csv.find("# tool: dspec " + std::string(kToolVersion)) == 0);
  CHECK(csv.find("# config_sha256: " + config_sha256(d)) != std::string::npos);
  CHECK(csv.find("\nn,folner_size,epsilon,lower,upper,exact,samples,seed,runtime_ms\n") != std::string::npos);
  CHECK(csv.find("\n4,4,0.2,") != std::string::npos);
  CHECK(r.files[1].content.find("<path d=\"M") != std::string::npos);
  CHECK(r.files[1].content.find(config_sha256(d)) != std::string::npos);
  CHECK(r.summary["config_sha256"] == config_sha256(d));
  CHECK(r.summary["version"] == kToolVersion);
  CHECK_FALSE(r.summary.contains("runtime_ms"));
  // same bytes again, and with timings only runtime fields change
  const auto again = run_experiment(c, {3, false});
  for (std::size_t i = 0; i < r.files.size(); ++i) CHECK(again.files[i].content == r.files[i].content);
  CHECK(run_experiment(c, {1, true}).summary.contains("runtime_ms"));
}

TEST_CASE("tempered pipeline") {
  const auto c = parse_config(parse_json_text(find_preset("tempered-boxes")->text, "tempered-boxes"));
  const auto r = run_experiment(c);
  CHECK(r.summary["max_ratio"]["exact"] == "126/64");
  // boxes [0,n) are tempered with constant 2, so every index survives
  CHECK(r.summary["tempered_subsequence"].size() == 64);
  const auto& csv = r.files[0].content;
  CHECK(csv.find("\n1,1,2/1,2,,\n") != std::string::npos);
  CHECK(csv.find("\n64,64,2/64,0.03125,126/64,1.96875\n") != std::string::npos);
}

TEST_CASE("finite crosscheck preset agrees") {
  const auto c = parse_config(parse_json_text(find_preset("equicont-finite")->text, "equicont-finite"));
  const auto r = run_experiment(c);
  CHECK(r.exit_code == 0);
  CHECK(r.summary["agree"] == true);
  CHECK(r.files[0].name == "modulus.csv");
}
