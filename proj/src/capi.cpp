#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "dspec/dspec.h"
#include "error.hpp"
#include "experiment.hpp"

struct dspec_config {
  dspec::ExperimentConfig cfg;
  std::string hash;
};

struct dspec_result {
  dspec::RunResult run;
};

namespace {

thread_local std::string g_last_error;

dspec_status status_of(dspec::ErrorKind k) {
  switch (k) {
    case dspec::ErrorKind::input: return DSPEC_ERR_INPUT;
    case dspec::ErrorKind::unsupported: return DSPEC_ERR_UNSUPPORTED;
    case dspec::ErrorKind::resource: return DSPEC_ERR_RESOURCE;
    case dspec::ErrorKind::partition: return DSPEC_ERR_PARTITION;
    case dspec::ErrorKind::numerical: return DSPEC_ERR_NUMERICAL;
    case dspec::ErrorKind::setup: return DSPEC_ERR_SETUP;
    case dspec::ErrorKind::config: return DSPEC_ERR_CONFIG;
  }
  return DSPEC_ERR_INTERNAL;
}

// every exported call funnels exceptions through here
template <class F>
dspec_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return DSPEC_OK;
  } catch (const dspec::Error& e) {
    g_last_error = std::string(dspec::to_string(e.kind())) + ": " + e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "resource error: out of memory";
    return DSPEC_ERR_RESOURCE;
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
    return DSPEC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "internal error: unknown exception";
    return DSPEC_ERR_INTERNAL;
  }
}

dspec_status null_arg(const char* what) {
  g_last_error = std::string("input error: ") + what + " is NULL";
  return DSPEC_ERR_INPUT;
}

dspec_status make_config(const std::string& text, const std::string& origin, const char* verb, int has_seed,
                         uint64_t seed, dspec_config** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    std::optional<dspec::Pipeline> p;
    if (verb) {
      p = dspec::pipeline_from_verb(verb);
      dspec::require(p.has_value(), dspec::ErrorKind::config, std::string("unknown verb '") + verb + "'");
    }
    const auto doc = dspec::parse_json_text(text, origin);
    auto c = std::make_unique<dspec_config>();
    c->cfg = dspec::parse_config(doc, has_seed ? std::optional<std::uint64_t>(seed) : std::nullopt, p);
    c->hash = dspec::config_sha256(c->cfg.doc);
    *out = c.release();
  });
}

}  // namespace

extern "C" {

const char* dspec_version(void) { return dspec::kToolVersion; }

const char* dspec_status_name(dspec_status s) {
  switch (s) {
    case DSPEC_OK: return "ok";
    case DSPEC_ERR_INPUT: return "input";
    case DSPEC_ERR_UNSUPPORTED: return "unsupported";
    case DSPEC_ERR_RESOURCE: return "resource";
    case DSPEC_ERR_PARTITION: return "partition";
    case DSPEC_ERR_NUMERICAL: return "numerical";
    case DSPEC_ERR_SETUP: return "setup";
    case DSPEC_ERR_CONFIG: return "config";
    case DSPEC_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* dspec_last_error(void) { return g_last_error.c_str(); }

size_t dspec_preset_count(void) { return dspec::presets().size(); }

const char* dspec_preset_name(size_t index) {
  const auto& p = dspec::presets();
  return index < p.size() ? p[index].name.c_str() : nullptr;
}

const char* dspec_preset_json(const char* name) {
  if (!name) return nullptr;
  const auto* p = dspec::find_preset(name);
  return p ? p->text.c_str() : nullptr;
}

dspec_status dspec_config_from_json(const char* json, const char* verb, int has_seed, uint64_t seed, dspec_config** out) {
  if (!json) return null_arg("json");
  return make_config(json, "config", verb, has_seed, seed, out);
}

dspec_status dspec_config_from_file(const char* path, const char* verb, int has_seed, uint64_t seed, dspec_config** out) {
  if (!path) return null_arg("path");
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (out) *out = nullptr;
    g_last_error = std::string("config error: cannot read ") + path;
    return DSPEC_ERR_CONFIG;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return make_config(ss.str(), path, verb, has_seed, seed, out);
}

dspec_status dspec_config_from_preset(const char* name, const char* verb, int has_seed, uint64_t seed,
                                      dspec_config** out) {
  if (!name) return null_arg("name");
  const auto* p = dspec::find_preset(name);
  if (!p) {
    if (out) *out = nullptr;
    g_last_error = std::string("config error: no preset named '") + name + "'";
    return DSPEC_ERR_CONFIG;
  }
  return make_config(p->text, std::string("preset ") + name, verb, has_seed, seed, out);
}

dspec_status dspec_config_hash(const dspec_config* config, char out[65]) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  std::memcpy(out, config->hash.c_str(), 65);
  return DSPEC_OK;
}

const char* dspec_config_pipeline(const dspec_config* config) {
  return config ? dspec::to_string(config->cfg.pipeline) : nullptr;
}

void dspec_config_free(dspec_config* config) { delete config; }

dspec_status dspec_run(const dspec_config* config, int workers, int timings, dspec_result** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    dspec::require(workers >= 1, dspec::ErrorKind::input, "workers must be >= 1");
    auto r = std::make_unique<dspec_result>();
    r->run = dspec::run_experiment(config->cfg, {workers, timings != 0});
    *out = r.release();
  });
}

int dspec_result_exit_code(const dspec_result* result) { return result ? result->run.exit_code : 1; }

size_t dspec_result_file_count(const dspec_result* result) { return result ? result->run.files.size() : 0; }

const char* dspec_result_file_name(const dspec_result* result, size_t index) {
  if (!result || index >= result->run.files.size()) return nullptr;
  return result->run.files[index].name.c_str();
}

const char* dspec_result_file_data(const dspec_result* result, size_t index, size_t* size) {
  if (!result || index >= result->run.files.size()) return nullptr;
  const auto& c = result->run.files[index].content;
  if (size) *size = c.size();
  return c.c_str();
}

const char* dspec_result_summary(const dspec_result* result) {
  if (!result || result->run.files.empty()) return nullptr;
  return result->run.files.back().content.c_str();
}

dspec_status dspec_result_write(const dspec_result* result, const char* directory) {
  if (!result) return null_arg("result");
  if (!directory) return null_arg("directory");
  return guarded([&] { dspec::write_artifacts(result->run, directory); });
}

void dspec_result_free(dspec_result* result) { delete result; }

dspec_status dspec_run_config(const char* json, const char* directory, int workers, int* exit_code) {
  if (exit_code) *exit_code = 1;
  dspec_config* c = nullptr;
  dspec_status s = dspec_config_from_json(json, nullptr, 0, 0, &c);
  if (s != DSPEC_OK) return s;
  dspec_result* r = nullptr;
  s = dspec_run(c, workers, 0, &r);
  dspec_config_free(c);
  if (s != DSPEC_OK) return s;
  if (directory) s = dspec_result_write(r, directory);
  if (s == DSPEC_OK && exit_code) *exit_code = r->run.exit_code;
  dspec_result_free(r);
  return s;
}

}  // extern "C"
