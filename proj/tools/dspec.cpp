// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dspec/dspec.h"
#include "json.hpp"

namespace {

struct Args {
  std::string config, preset, out = "dspec_out";
  std::optional<std::uint64_t> seed;
  int workers = 1;
  bool timings = false;
};

void add_run_flags(CLI::App* cmd, Args& a) {
  auto* src = cmd->add_option("--config", a.config, "experiment config (JSON)");
  cmd->add_option("--preset", a.preset, "built-in preset name (see list-presets)")->excludes(src);
  cmd->add_option("--seed", a.seed, "override the config seed");
  cmd->add_option("--workers", a.workers, "worker threads; outputs do not depend on it")->check(CLI::Range(1, 1024));
  cmd->add_option("--out", a.out, "output directory");
  cmd->add_flag("--timings", a.timings, "record wall-clock times (outputs then differ between runs)");
}

int fail(dspec_status s) {
  std::cerr << "dspec: " << dspec_last_error() << " [" << dspec_status_name(s) << "]\n";
  return 1;
}

void print_brief(const nlohmann::json& s) {
  for (const char* k : {"verdict", "agree", "conclusive_conflict", "reason"})
    if (s.contains(k)) std::cout << "  " << k << ": " << (s[k].is_string() ? s[k].get<std::string>() : s[k].dump()) << "\n";
  if (s.contains("boundedness")) std::cout << "  complexity: " << s["boundedness"]["verdict"].get<std::string>() << "\n";
  if (s.contains("ap")) std::cout << "  orbit nets: " << s["ap"]["verdict"].get<std::string>() << "\n";
  if (s.contains("limsup_proxy"))
    std::cout << "  moduli: " << s["limsup_proxy"]["class"].get<std::string>() << " (limsup proxy), "
              << s["all_n"]["class"].get<std::string>() << " (all n)\n";
  if (s.contains("semimetrics"))
    for (const auto& m : s["semimetrics"])
      std::cout << "  " << m["semimetric"].get<std::string>() << ": " << m["boundedness"]["verdict"].get<std::string>() << "\n";
  if (s.contains("max_ratio")) std::cout << "  max tempered ratio: " << s["max_ratio"]["exact"].get<std::string>() << "\n";
}

int run(const std::string& verb, const Args& a) {
  if (a.config.empty() == a.preset.empty()) {
    std::cerr << "dspec: give exactly one of --config or --preset\n";
    return 1;
  }
  dspec_config* cfg = nullptr;
  const int has_seed = a.seed.has_value();
  const std::uint64_t seed = a.seed.value_or(0);
  dspec_status s = a.config.empty() ? dspec_config_from_preset(a.preset.c_str(), verb.c_str(), has_seed, seed, &cfg)
                                    : dspec_config_from_file(a.config.c_str(), verb.c_str(), has_seed, seed, &cfg);
  if (s != DSPEC_OK) return fail(s);
  char hash[65];
  dspec_config_hash(cfg, hash);
  dspec_result* res = nullptr;
  s = dspec_run(cfg, a.workers, a.timings ? 1 : 0, &res);
  dspec_config_free(cfg);
  if (s != DSPEC_OK) return fail(s);
  s = dspec_result_write(res, a.out.c_str());
  if (s != DSPEC_OK) {
    dspec_result_free(res);
    return fail(s);
  }
  const int code = dspec_result_exit_code(res);
  std::cout << verb << "  config " << hash << "\n";
  print_brief(nlohmann::json::parse(dspec_result_summary(res)));
  for (size_t i = 0; i < dspec_result_file_count(res); ++i)
    std::cout << "  wrote " << a.out << "/" << dspec_result_file_name(res, i) << "\n";
  dspec_result_free(res);
  if (code == 2) std::cout << "  conclusive disagreement between the two sides (exit 2)\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dspec: discrete-spectrum diagnostics via measure complexity"};
  app.set_version_flag("--version", std::string(dspec_version()));
  app.require_subcommand(1);

  Args args;
  const char* verbs[][2] = {
      {"check-tempered", "exact Følner defects and temperedness ratios"},
      {"profile-complexity", "complexity bounds over the (n, eps) grid and a boundedness verdict"},
      {"ap-test", "orbit nets of an observable in L2, with the complexity crosscheck when grids are given"},
      {"equicontinuity", "mean equicontinuity moduli, with the complexity crosscheck when grids are given"},
      {"verify-theorem", "run the crosscheck named by the config's theorem field"},
  };
  std::string chosen;
  for (const auto& v : verbs) {
    auto* cmd = app.add_subcommand(v[0], v[1]);
    add_run_flags(cmd, args);
    cmd->callback([&chosen, name = std::string(v[0])] { chosen = name; });
  }
  auto* list = app.add_subcommand("list-presets", "print the built-in presets");
  list->callback([&chosen] { chosen = "list-presets"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (chosen == "list-presets") {
    for (size_t i = 0; i < dspec_preset_count(); ++i) {
      const char* name = dspec_preset_name(i);
      const auto j = nlohmann::json::parse(dspec_preset_json(name));
      std::cout << name << "\t" << j.value("pipeline", "?");
      if (j.contains("theorem")) std::cout << " " << j["theorem"].get<std::string>();
      std::cout << "\t" << j.value("description", "") << "\n";
    }
    return 0;
  }
  return run(chosen, args);
}
