#include "experiment.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>

#include "error.hpp"
#include "report.hpp"

namespace dspec {

namespace {

struct Context {
  const ExperimentConfig& cfg;
  const RunOptions& opt;
  std::string hash;
  RunResult result;

  void stamp(Csv& csv, const std::string& what) const {
    csv.meta("tool", std::string("dspec ") + kToolVersion);
    csv.meta("config_sha256", hash);
    csv.meta("pipeline", to_string(cfg.pipeline));
    csv.meta("content", what);
    csv.meta("seed", std::to_string(cfg.seed));
    if (cfg.system) csv.meta("system", cfg.system->describe());
  }
  void add(std::string name, std::string content) { result.files.push_back({std::move(name), std::move(content)}); }
};

std::string opt_count(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : ""; }
std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : ""; }

Json ratio_json(const Ratio& r) { return Json{{"exact", r.str()}, {"value", r.value()}}; }

Json boundedness_json(const BoundednessReport& b) {
  Json fits = Json::array();
  for (const auto& f : b.fits)
    fits.push_back({{"epsilon", f.epsilon},
                    {"points", f.points},
                    {"ratio", f.ratio},
                    {"slope", f.slope},
                    {"lower_confirms", f.lower_confirms},
                    {"verdict", to_string(f.verdict)}});
  return {{"verdict", to_string(b.verdict)},
          {"reason", b.reason},
          {"thresholds", {{"band", b.thresholds.band}, {"slope", b.thresholds.slope}, {"min_points", b.thresholds.min_points}}},
          {"fits", fits}};
}

void profile_files(Context& ctx, const ComplexityProfile& p, const std::string& stem) {
  Csv csv({"n", "folner_size", "epsilon", "lower", "upper", "exact", "samples", "seed", "runtime_ms"});
  ctx.stamp(csv, "complexity profile");
  csv.meta("semimetric", p.semimetric);
  for (const auto& r : p.rows)
    csv.row({std::to_string(r.n), std::to_string(r.folner_size), num(r.epsilon), std::to_string(r.lower),
             std::to_string(r.upper), opt_count(r.exact), std::to_string(r.samples), std::to_string(r.seed),
             ctx.opt.timings ? num(r.runtime_ms) : ""});
  ctx.add(stem + ".csv", csv.str());

  std::vector<Series> series;
  for (double e : ctx.cfg.eps_grid) {
    Series s{"upper, eps=" + num(e), {}, {}};
    for (const auto& r : p.rows)
      if (r.epsilon == e) s.x.push_back(static_cast<double>(r.n)), s.y.push_back(static_cast<double>(r.upper));
    series.push_back(std::move(s));
  }
  ctx.add(stem + ".svg", svg_plot("C vs n: " + p.semimetric, "n", "C (greedy upper)", series,
                                  {std::string("dspec ") + kToolVersion, "config_sha256 " + ctx.hash}));
}

Json profile_json(const ComplexityProfile& p) {
  Json rows = Json::array();
  for (const auto& r : p.rows) {
    Json row{{"n", r.n}, {"epsilon", r.epsilon}, {"lower", r.lower}, {"upper", r.upper}, {"lower_rigorous", r.lower_rigorous}};
    if (r.exact) row["exact"] = *r.exact;
    rows.push_back(row);
  }
  return {{"semimetric", p.semimetric}, {"finite_space", p.finite_space}, {"rows", rows}};
}

void time_rows(ComplexityProfile& p, bool keep) {
  if (!keep)
    for (auto& r : p.rows) r.runtime_ms = 0.0;
}

// ---------------------------------------------------------------- pipelines

void check_tempered(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& seq = *cfg.folner;
  const auto gens = seq.group().standard_generators();
  const auto prof = temperedness_profile(seq, cfg.tempered.n_max);
  Csv csv({"n", "folner_size", "max_defect", "max_defect_value", "tempered_ratio", "tempered_ratio_value"});
  ctx.stamp(csv, "Følner defect over standard generators and temperedness ratios");
  Json defects = Json::array();
  for (std::int64_t n = 1; n <= cfg.tempered.n_max; ++n) {
    Ratio worst{0, 1};
    for (const auto& g : gens) worst = std::max(worst, folner_defect(seq, n, g));
    std::string tr, tv;
    if (n >= 2) {
      const auto& r = prof.ratios[static_cast<std::size_t>(n - 2)];
      tr = r.str();
      tv = num(r.value());
    }
    csv.row({std::to_string(n), std::to_string(seq.set(n)->size()), worst.str(), num(worst.value()), tr, tv});
  }
  ctx.add("tempered.csv", csv.str());
  auto& s = ctx.result.summary;
  s["max_ratio"] = ratio_json(prof.max_ratio);
  s["n_max"] = cfg.tempered.n_max;
  if (cfg.tempered.constant) {
    s["tempered_subsequence"] = tempered_subsequence(seq, cfg.tempered.n_max, *cfg.tempered.constant);
    s["constant"] = *cfg.tempered.constant;
  }
}

ComplexityProfile run_profile(Context& ctx, const Semimetric& w) {
  const auto& cfg = ctx.cfg;
  auto p = complexity_profile(*cfg.system, w, *cfg.folner, cfg.n_grid, cfg.eps_grid, cfg.seed, cfg.samples, cfg.complexity);
  time_rows(p, ctx.opt.timings);
  return p;
}

void profile_complexity(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto p = run_profile(ctx, cfg.semimetrics[0]);
  if (cfg.exact_words_p)
    for (auto& r : p.rows) r.exact = complexity_words_exact(*cfg.exact_words_p, *cfg.folner, r.n, r.epsilon, cfg.complexity);
  const auto b = boundedness_diagnostic(p, cfg.thresholds);
  profile_files(ctx, p, "profile");
  auto& s = ctx.result.summary;
  s["profile"] = profile_json(p);
  s["boundedness"] = boundedness_json(b);
  s["verdict"] = to_string(b.verdict);
  if (cfg.exact_words_p) s["exact_source"] = "word space, p=" + cfg.exact_words_p->str();
}

Json ap_json(const ApReport& a) {
  return {{"observable", a.observable}, {"norm", a.norm},           {"radii", a.radii},
          {"ball_sizes", a.ball_sizes}, {"epsilons", a.epsilons},   {"net_sizes", a.net_sizes},
          {"verdict", to_string(a.verdict)}, {"reason", a.reason}, {"sample_count", a.sample_count}};
}

void ap_files(Context& ctx, const ApReport& a) {
  Csv csv({"epsilon", "radius", "ball_size", "net_size"});
  ctx.stamp(csv, "orbit nets in L2");
  csv.meta("observable", a.observable);
  for (std::size_t e = 0; e < a.epsilons.size(); ++e)
    for (std::size_t r = 0; r < a.radii.size(); ++r)
      csv.row({num(a.epsilons[e]), std::to_string(a.radii[r]), std::to_string(a.ball_sizes[r]),
               std::to_string(a.net_sizes[e][r])});
  ctx.add("ap.csv", csv.str());
}

void ap_crosscheck(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto r = ap_vs_complexity_crosscheck(*cfg.system, *cfg.observable, *cfg.folner, cfg.n_grid, cfg.eps_grid, cfg.samples,
                                       cfg.ap, cfg.complexity, cfg.thresholds);
  time_rows(r.profile, ctx.opt.timings);
  ap_files(ctx, r.ap);
  profile_files(ctx, r.profile, "profile");
  auto& s = ctx.result.summary;
  s["ap"] = ap_json(r.ap);
  s["profile"] = profile_json(r.profile);
  s["boundedness"] = boundedness_json(r.boundedness);
  s["agree"] = r.agree;
  s["conclusive_conflict"] = r.conclusive_conflict;
  if (r.conclusive_conflict) ctx.result.exit_code = 2;
}

void ap_only(Context& ctx) {
  const auto a = ap_test(*ctx.cfg.system, *ctx.cfg.observable, ctx.cfg.ap);
  ap_files(ctx, a);
  ctx.result.summary["ap"] = ap_json(a);
  ctx.result.summary["verdict"] = to_string(a.verdict);
}

Json modulus_json(const ModulusReport& m, ModulusClass c) {
  Json mod = Json::array();
  for (const auto& v : m.modulus) mod.push_back(v ? Json(*v) : Json(nullptr));
  return {{"mode", to_string(m.mode)}, {"n0", m.n0},           {"n_max", m.n_max},       {"deltas", m.deltas},
          {"modulus", mod},            {"base_sup", m.base_sup}, {"pairs_used", m.pairs_used},
          {"class", to_string(c)}};
}

void modulus_file(Context& ctx, const std::vector<const ModulusReport*>& reps, double core_mass) {
  Csv csv({"mode", "delta", "modulus", "base_sup", "pairs_used"});
  ctx.stamp(csv, "equicontinuity moduli (empty modulus: no close pair)");
  csv.meta("semimetric", reps.front()->semimetric);
  csv.meta("core_mass", num(core_mass));
  for (const auto* m : reps)
    for (std::size_t k = 0; k < m->deltas.size(); ++k)
      csv.row({to_string(m->mode), num(m->deltas[k]), opt_num(m->modulus[k]), num(m->base_sup[k]),
               std::to_string(m->pairs_used[k])});
  ctx.add("modulus.csv", csv.str());
}

Json core_json(const Core& c) {
  return {{"size", c.points.size()}, {"sample_count", c.sample_count}, {"mass", c.mass}, {"exact", c.exact}, {"tau", c.tau}};
}

void equicont_crosscheck(Context& ctx) {
  const auto& cfg = ctx.cfg;
  EquicontSettings s = cfg.equicont;
  s.n_grid = cfg.n_grid;
  s.eps_grid = cfg.eps_grid;
  s.complexity_samples = cfg.samples;
  s.complexity = cfg.complexity;
  s.thresholds = cfg.thresholds;
  auto r = equicontinuity_crosscheck(*cfg.system, *cfg.folner, s);
  time_rows(r.profile, ctx.opt.timings);
  modulus_file(ctx, {&r.limsup, &r.all_n}, r.core.mass);
  profile_files(ctx, r.profile, "profile");
  auto& j = ctx.result.summary;
  j["core"] = core_json(r.core);
  j["limsup_proxy"] = modulus_json(r.limsup, r.limsup_class);
  j["all_n"] = modulus_json(r.all_n, r.all_n_class);
  if (r.tempered_constant) j["tempered_constant"] = ratio_json(*r.tempered_constant);
  else j["tempered_constant"] = nullptr;
  j["profile"] = profile_json(r.profile);
  j["boundedness"] = boundedness_json(r.boundedness);
  j["agree"] = r.agree;
  j["conclusive_conflict"] = r.conclusive_conflict;
  j["reason"] = r.reason;
  if (r.conclusive_conflict) ctx.result.exit_code = 2;
}

void equicont_only(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& s = cfg.equicont;
  const auto w = Semimetric::base();
  const auto core = core_select(*cfg.system, w, *cfg.folner, s.n_max, cfg.seed, s.sample_count, s.tau, s.core);
  ModulusOptions mo = s.modulus;
  mo.seed = cfg.seed;
  const auto lim = mean_equicontinuity_modulus(*cfg.system, w, core, *cfg.folner, s.deltas, s.n_max, mo);
  const auto all = equicont_in_mean_modulus(*cfg.system, w, core, *cfg.folner, s.deltas, s.n_max, mo);
  modulus_file(ctx, {&lim, &all}, core.mass);
  auto& j = ctx.result.summary;
  j["core"] = core_json(core);
  j["limsup_proxy"] = modulus_json(lim, classify_modulus(lim, s.vanishing_ratio));
  j["all_n"] = modulus_json(all, classify_modulus(all, s.vanishing_ratio));
}

void robustness(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto r = metric_robustness_check(*cfg.system, *cfg.folner, cfg.semimetrics, cfg.n_grid, cfg.eps_grid, cfg.seed,
                                   cfg.samples, cfg.complexity, cfg.thresholds);
  Json metrics = Json::array();
  for (std::size_t i = 0; i < r.profiles.size(); ++i) {
    time_rows(r.profiles[i], ctx.opt.timings);
    profile_files(ctx, r.profiles[i], "profile_" + std::to_string(i));
    metrics.push_back({{"semimetric", r.semimetrics[i]},
                       {"profile", profile_json(r.profiles[i])},
                       {"boundedness", boundedness_json(r.reports[i])}});
  }
  auto& j = ctx.result.summary;
  j["semimetrics"] = metrics;
  j["agree"] = r.agree;
  j["conclusive_conflict"] = r.conclusive_conflict;
  if (r.conclusive_conflict) ctx.result.exit_code = 2;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  require(opt.workers >= 1, ErrorKind::input, "workers must be >= 1");
  ExperimentConfig local = cfg;
  local.set_workers(opt.workers);
  Context ctx{local, opt, config_sha256(cfg.doc), {}};
  auto& s = ctx.result.summary;
  s["tool"] = "dspec";
  s["version"] = kToolVersion;
  s["config_sha256"] = ctx.hash;
  s["pipeline"] = to_string(cfg.pipeline);
  s["seed"] = cfg.seed;
  if (!cfg.name.empty()) s["name"] = cfg.name;
  if (cfg.system) s["system"] = cfg.system->describe();
  if (cfg.theorem) s["theorem"] = to_string(*cfg.theorem);

  const auto t0 = std::chrono::steady_clock::now();
  const bool grids = !cfg.n_grid.empty();
  switch (cfg.pipeline) {
    case Pipeline::check_tempered: check_tempered(ctx); break;
    case Pipeline::profile_complexity: profile_complexity(ctx); break;
    case Pipeline::ap_test: grids ? ap_crosscheck(ctx) : ap_only(ctx); break;
    case Pipeline::equicontinuity: grids ? equicont_crosscheck(ctx) : equicont_only(ctx); break;
    case Pipeline::verify_theorem:
      switch (*cfg.theorem) {
        case Theorem::discrete_spectrum:
        case Theorem::metric_robustness: robustness(ctx); break;
        case Theorem::almost_periodic: ap_crosscheck(ctx); break;
        case Theorem::equicontinuity: equicont_crosscheck(ctx); break;
      }
      break;
  }
  if (opt.timings)
    s["runtime_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  s["exit_code"] = ctx.result.exit_code;
  ctx.add("summary.json", s.dump(2) + "\n");
  return std::move(ctx.result);
}

void write_artifacts(const RunResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::input, "cannot create output directory " + dir + ": " + ec.message());
  for (const auto& a : r.files) {
    const auto path = fs::path(dir) / a.name;
    std::ofstream out(path, std::ios::binary);
    out.write(a.content.data(), static_cast<std::streamsize>(a.content.size()));
    require(static_cast<bool>(out), ErrorKind::input, "cannot write " + path.string());
  }
}

const Preset* find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

}  // namespace dspec
