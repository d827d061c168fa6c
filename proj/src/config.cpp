#include "config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "error.hpp"

namespace dspec {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& msg) { fail(ErrorKind::config, path + ": " + msg); }

std::string item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

/// Object view that rejects unknown keys up front.
class Obj {
 public:
  Obj(const Json& j, std::string path, std::initializer_list<const char*> allowed) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) bad(path_, "expected an object");
    for (const auto& [k, v] : j.items()) {
      (void)v;
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
        bad(path_ + "." + k, "unknown field");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  const Json& at(const char* key) const {
    if (!has(key)) bad(path(key), "required field is missing");
    return j_.at(key);
  }
  std::string path(const char* key) const { return path_ + "." + key; }
  const std::string& path() const { return path_; }

 private:
  const Json& j_;
  std::string path_;
};

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(path, "expected a finite number");
  return v;
}

std::int64_t as_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
    bad(path, "integer out of range");
  return j.get<std::int64_t>();
}

std::uint64_t as_u64(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected a nonnegative integer");
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  const auto v = j.get<std::int64_t>();
  if (v < 0) bad(path, "expected a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

std::uint64_t positive(const Json& j, const std::string& path) {
  const auto v = as_u64(j, path);
  if (v == 0) bad(path, "must be positive");
  return v;
}

const Json& as_array(const Json& j, const std::string& path, bool nonempty = true) {
  if (!j.is_array()) bad(path, "expected an array");
  if (nonempty && j.empty()) bad(path, "must not be empty");
  return j;
}

std::vector<double> numbers(const Json& j, const std::string& path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < as_array(j, path).size(); ++i) out.push_back(as_number(j[i], item(path, i)));
  return out;
}

std::vector<std::int64_t> ints(const Json& j, const std::string& path, bool nonempty = true) {
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < as_array(j, path, nonempty).size(); ++i) out.push_back(as_int(j[i], item(path, i)));
  return out;
}

void require_open_unit(const std::vector<double>& v, const std::string& path) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0 && v[i] < 1.0)) bad(item(path, i), "must lie in (0,1)");
}

void require_ascending(const std::vector<double>& v, const std::string& path) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) bad(item(path, i), "grid must be strictly ascending");
}

GroupSpec parse_group(const Json& j, const std::string& path) {
  Obj o(j, path, {"kind", "rank", "moduli"});
  const auto kind = as_string(o.at("kind"), o.path("kind"));
  if (kind == "lattice") {
    const auto r = o.has("rank") ? positive(o.at("rank"), o.path("rank")) : 1;
    if (r > 8) bad(o.path("rank"), "lattice rank above 8 is not supported");
    return GroupSpec::lattice(r);
  }
  if (kind == "heisenberg3") return GroupSpec::heisenberg3();
  if (kind == "finite_abelian") {
    const auto m = ints(o.at("moduli"), o.path("moduli"));
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i] < 1) bad(item(o.path("moduli"), i), "moduli must be >= 1");
    return GroupSpec::finite_abelian(m);
  }
  bad(o.path("kind"), "unknown group kind '" + kind + "'");
}

std::vector<std::vector<double>> parse_distance(const Json& j, const std::string& path, std::size_t n) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "discrete") return FiniteSystem::discrete_metric(n);
    if (s == "cyclic") return FiniteSystem::cyclic_metric(n);
    if (s == "line") {
      std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          d[a][b] = n > 1 ? std::abs(static_cast<double>(a) - static_cast<double>(b)) / static_cast<double>(n - 1) : 0.0;
      return d;
    }
    bad(path, "unknown metric '" + s + "' (discrete, cyclic, line or a matrix)");
  }
  std::vector<std::vector<double>> d;
  for (std::size_t a = 0; a < as_array(j, path).size(); ++a) d.push_back(numbers(j[a], item(path, a)));
  if (d.size() != n) bad(path, "matrix must have one row per atom");
  for (std::size_t a = 0; a < n; ++a)
    if (d[a].size() != n) bad(item(path, a), "matrix must be square");
  return d;
}

std::shared_ptr<const DynamicalSystem> parse_system(const Json& j, const std::string& path) {
  const Json* kind_j = j.is_object() && j.contains("kind") ? &j.at("kind") : nullptr;
  if (!kind_j) bad(path + ".kind", "required field is missing");
  const auto kind = as_string(*kind_j, path + ".kind");
  try {
    if (kind == "rotation") {
      Obj o(j, path, {"kind", "group_rank", "dimension", "angles"});
      const auto rank = o.has("group_rank") ? positive(o.at("group_rank"), o.path("group_rank")) : 1;
      const auto& aj = as_array(o.at("angles"), o.path("angles"));
      std::vector<std::vector<double>> angles;
      for (std::size_t g = 0; g < aj.size(); ++g) {
        angles.push_back(numbers(aj[g], item(o.path("angles"), g)));
        for (std::size_t c = 0; c < angles.back().size(); ++c)
          if (!(angles.back()[c] >= 0.0 && angles.back()[c] < 1.0))
            bad(item(item(o.path("angles"), g), c), "angles must lie in [0,1)");
      }
      if (angles.size() != rank) bad(o.path("angles"), "need one angle vector per group generator");
      const std::size_t dim = o.has("dimension") ? positive(o.at("dimension"), o.path("dimension")) : angles[0].size();
      for (std::size_t g = 0; g < angles.size(); ++g)
        if (angles[g].size() != dim) bad(item(o.path("angles"), g), "length must equal the torus dimension");
      return std::make_shared<TorusSystem>(GroupSpec::lattice(rank), dim, angles);
    }
    if (kind == "bernoulli" || kind == "markov") {
      Obj o(j, path, {"kind", "group_rank", "probabilities", "transition", "metric_radius", "window_radius"});
      const auto rank = o.has("group_rank") ? positive(o.at("group_rank"), o.path("group_rank")) : 1;
      const std::int64_t W = o.has("metric_radius") ? static_cast<std::int64_t>(positive(o.at("metric_radius"), o.path("metric_radius")))
                                                    : SubshiftSystem::kDefaultMetricRadius;
      const std::int64_t R = o.has("window_radius") ? static_cast<std::int64_t>(positive(o.at("window_radius"), o.path("window_radius")))
                                                    : SubshiftSystem::kDefaultWindowRadius;
      if (kind == "bernoulli") {
        if (o.has("transition")) bad(o.path("transition"), "only valid for markov systems");
        const auto p = numbers(o.at("probabilities"), o.path("probabilities"));
        for (std::size_t i = 0; i < p.size(); ++i)
          if (!(p[i] >= 0.0)) bad(item(o.path("probabilities"), i), "probabilities must be nonnegative");
        return std::make_shared<SubshiftSystem>(rank, p.size(), SubshiftSystem::Bernoulli{p}, W, R);
      }
      if (o.has("probabilities")) bad(o.path("probabilities"), "only valid for bernoulli systems");
      if (rank != 1) bad(o.path("group_rank"), "markov measures are supported on Z only");
      std::vector<std::vector<double>> t;
      const auto& tj = as_array(o.at("transition"), o.path("transition"));
      for (std::size_t a = 0; a < tj.size(); ++a) t.push_back(numbers(tj[a], item(o.path("transition"), a)));
      const auto n = t.size();
      return std::make_shared<SubshiftSystem>(1, n, SubshiftSystem::Markov{t}, W, R);
    }
    if (kind == "cyclic_shift") {
      Obj o(j, path, {"kind", "size", "metric"});
      const auto n = positive(o.at("size"), o.path("size"));
      if (n > 1'000'000) bad(o.path("size"), "too many atoms");
      std::vector<std::uint32_t> p(n);
      for (std::uint32_t i = 0; i < n; ++i) p[i] = static_cast<std::uint32_t>((i + 1) % n);
      const auto d = o.has("metric") ? parse_distance(o.at("metric"), o.path("metric"), n) : FiniteSystem::cyclic_metric(n);
      return std::make_shared<FiniteSystem>(GroupSpec::lattice(1), std::vector<std::vector<std::uint32_t>>{p}, std::vector<std::int64_t>(n, 1), d);
    }
    if (kind == "finite") {
      Obj o(j, path, {"kind", "group", "permutations", "weights", "metric"});
      const auto group = o.has("group") ? parse_group(o.at("group"), o.path("group")) : GroupSpec::lattice(1);
      std::vector<std::vector<std::uint32_t>> perms;
      const auto& pj = as_array(o.at("permutations"), o.path("permutations"));
      for (std::size_t g = 0; g < pj.size(); ++g) {
        const auto row = ints(pj[g], item(o.path("permutations"), g));
        std::vector<std::uint32_t> p;
        for (std::size_t i = 0; i < row.size(); ++i) {
          if (row[i] < 0 || static_cast<std::size_t>(row[i]) >= row.size())
            bad(item(item(o.path("permutations"), g), i), "image out of range");
          p.push_back(static_cast<std::uint32_t>(row[i]));
        }
        perms.push_back(std::move(p));
      }
      const auto n = perms[0].size();
      std::vector<std::int64_t> w(n, 1);
      if (o.has("weights")) {
        w = ints(o.at("weights"), o.path("weights"));
        if (w.size() != n) bad(o.path("weights"), "need one weight per atom");
        for (std::size_t i = 0; i < n; ++i)
          if (w[i] < 0) bad(item(o.path("weights"), i), "weights must be nonnegative integers");
      }
      const auto d = o.has("metric") ? parse_distance(o.at("metric"), o.path("metric"), n) : FiniteSystem::discrete_metric(n);
      return std::make_shared<FiniteSystem>(group, perms, w, d);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    bad(path, e.what());
  }
  bad(path + ".kind", "unknown system kind '" + kind + "'");
}

std::shared_ptr<const FolnerSequence> parse_folner(const Json& j, const std::string& path, const GroupSpec& group) {
  Obj o(j, path, {"rule", "scale", "offset", "sizes", "sets", "cardinality_budget"});
  const auto rule = as_string(o.at("rule"), o.path("rule"));
  const std::size_t budget = o.has("cardinality_budget") ? positive(o.at("cardinality_budget"), o.path("cardinality_budget"))
                                                         : FolnerSequence::kDefaultCardinalityBudget;
  auto size_rule = [&]() {
    SizeRule s;
    if (o.has("sizes")) {
      s.kind = SizeRule::Kind::table;
      s.table = ints(o.at("sizes"), o.path("sizes"));
      for (std::size_t i = 0; i < s.table.size(); ++i)
        if (s.table[i] < 0) bad(item(o.path("sizes"), i), "sizes must be nonnegative");
      return s;
    }
    if (o.has("scale")) s.scale = static_cast<std::int64_t>(positive(o.at("scale"), o.path("scale")));
    if (o.has("offset")) s.offset = as_int(o.at("offset"), o.path("offset"));
    if (s.offset < 0) bad(o.path("offset"), "offset must be nonnegative");
    return s;
  };
  if (rule == "default") return std::make_shared<FolnerSequence>(FolnerSequence::default_for(group).group(),
                                                                 FolnerSequence::default_for(group).rule(), budget);
  if (rule == "boxes") {
    if (group.kind() != GroupKind::lattice) bad(o.path("rule"), "boxes need a lattice group");
    return std::make_shared<FolnerSequence>(group, BoxesRule{size_rule()}, budget);
  }
  if (rule == "powers_of_two") {
    if (group.kind() != GroupKind::lattice) bad(o.path("rule"), "boxes need a lattice group");
    SizeRule s;
    s.kind = SizeRule::Kind::power_of_two;
    return std::make_shared<FolnerSequence>(group, BoxesRule{s}, budget);
  }
  if (rule == "word_balls") return std::make_shared<FolnerSequence>(group, WordBallsRule{{}, size_rule()}, budget);
  if (rule == "full_group") {
    if (!group.is_finite()) bad(o.path("rule"), "full_group needs a finite group");
    return std::make_shared<FolnerSequence>(group, FullGroupRule{}, budget);
  }
  if (rule == "explicit") {
    ExplicitRule r;
    const auto& sj = as_array(o.at("sets"), o.path("sets"));
    for (std::size_t n = 0; n < sj.size(); ++n) {
      std::vector<GroupElement> set;
      const auto p = item(o.path("sets"), n);
      for (std::size_t k = 0; k < as_array(sj[n], p).size(); ++k) {
        const auto c = ints(sj[n][k], item(p, k));
        if (c.size() != group.rank()) bad(item(p, k), "element has the wrong number of coordinates");
        set.push_back(group.element(std::span<const std::int64_t>(c)));
      }
      r.sets.push_back(std::move(set));
    }
    return std::make_shared<FolnerSequence>(group, r, budget);
  }
  bad(o.path("rule"), "unknown rule '" + rule + "'");
}

Observable parse_observable(const Json& j, const std::string& path, const DynamicalSystem& sys) {
  Obj o(j, path, {"kind", "value", "k", "coord", "symbol", "values"});
  const auto kind = as_string(o.at("kind"), o.path("kind"));
  const auto torus = dynamic_cast<const TorusSystem*>(&sys);
  const auto shift = dynamic_cast<const SubshiftSystem*>(&sys);
  if (kind == "constant") return Observable::constant(o.has("value") ? as_number(o.at("value"), o.path("value")) : 1.0);
  if (kind == "character") {
    if (!torus) bad(o.path("kind"), "characters need a rotation system");
    const auto k = ints(o.at("k"), o.path("k"));
    if (k.size() != torus->dim()) bad(o.path("k"), "frequency length must equal the torus dimension");
    return Observable::torus_character(k);
  }
  if (kind == "sin") {
    if (!torus) bad(o.path("kind"), "sin needs a rotation system");
    const auto c = o.has("coord") ? as_u64(o.at("coord"), o.path("coord")) : 0;
    if (c >= torus->dim()) bad(o.path("coord"), "coordinate out of range");
    return Observable::torus_sin(c);
  }
  if (kind == "origin_indicator") {
    if (!shift) bad(o.path("kind"), "origin_indicator needs a shift system");
    const auto s = o.has("symbol") ? as_u64(o.at("symbol"), o.path("symbol")) : 1;
    if (s >= shift->alphabet()) bad(o.path("symbol"), "symbol outside the alphabet");
    return Observable::origin_indicator(*shift, static_cast<std::uint8_t>(s));
  }
  if (kind == "atom_values") {
    if (sys.space_kind() != SpaceKind::finite) bad(o.path("kind"), "atom_values needs a finite system");
    const auto v = numbers(o.at("values"), o.path("values"));
    if (v.size() != sys.atom_count()) bad(o.path("values"), "need one value per atom");
    return Observable::atom_values(v);
  }
  bad(o.path("kind"), "unknown observable kind '" + kind + "'");
}

Partition parse_partition(const Json& j, const std::string& path, const DynamicalSystem& sys) {
  Obj o(j, path, {"kind", "cuts", "coord", "coords", "labels"});
  const auto kind = as_string(o.at("kind"), o.path("kind"));
  if (kind == "intervals") {
    const auto torus = dynamic_cast<const TorusSystem*>(&sys);
    if (!torus) bad(o.path("kind"), "intervals need a rotation system");
    const auto cuts = numbers(o.at("cuts"), o.path("cuts"));
    require_open_unit(cuts, o.path("cuts"));
    require_ascending(cuts, o.path("cuts"));
    const auto c = o.has("coord") ? as_u64(o.at("coord"), o.path("coord")) : 0;
    if (c >= torus->dim()) bad(o.path("coord"), "coordinate out of range");
    return Partition::torus_intervals(cuts, c);
  }
  if (kind == "cylinder") {
    const auto shift = dynamic_cast<const SubshiftSystem*>(&sys);
    if (!shift) bad(o.path("kind"), "cylinders need a shift system");
    std::vector<GroupElement> coords;
    if (o.has("coords")) {
      const auto& cj = as_array(o.at("coords"), o.path("coords"));
      for (std::size_t i = 0; i < cj.size(); ++i) {
        const auto c = ints(cj[i], item(o.path("coords"), i));
        if (c.size() != shift->dimension()) bad(item(o.path("coords"), i), "wrong number of coordinates");
        coords.push_back(GroupElement(std::span<const std::int64_t>(c)));
      }
    }
    return Partition::cylinder(*shift, coords);
  }
  if (kind == "atom_labels") {
    if (sys.space_kind() != SpaceKind::finite) bad(o.path("kind"), "atom_labels needs a finite system");
    std::vector<std::size_t> labels;
    const auto raw = ints(o.at("labels"), o.path("labels"));
    if (raw.size() != sys.atom_count()) bad(o.path("labels"), "need one label per atom");
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] < 0) bad(item(o.path("labels"), i), "labels must be nonnegative");
      labels.push_back(static_cast<std::size_t>(raw[i]));
    }
    return Partition::atom_labels(labels);
  }
  bad(o.path("kind"), "unknown partition kind '" + kind + "'");
}

Semimetric parse_semimetric(const Json& j, const std::string& path, const DynamicalSystem& sys) {
  Obj o(j, path, {"kind", "observable", "partition"});
  const auto kind = as_string(o.at("kind"), o.path("kind"));
  if (kind == "base") return Semimetric::base();
  if (kind == "sum") {
    if (sys.space_kind() == SpaceKind::finite) bad(o.path("kind"), "finite systems have no companion metric");
    return Semimetric::base_sum();
  }
  if (kind == "observable") return Semimetric::observable(parse_observable(o.at("observable"), o.path("observable"), sys));
  if (kind == "hamming") return Semimetric::hamming(parse_partition(o.at("partition"), o.path("partition"), sys));
  bad(o.path("kind"), "unknown semimetric kind '" + kind + "'");
}

void parse_budgets(const Json& j, const std::string& path, ComplexityOptions& c, ApOptions& ap) {
  (void)ap;
  Obj o(j, path, {"atom_budget", "word_length_budget", "incidence_budget", "node_budget", "local_search_moves"});
  if (o.has("atom_budget")) c.atom_budget = positive(o.at("atom_budget"), o.path("atom_budget"));
  if (o.has("word_length_budget")) c.word_length_budget = positive(o.at("word_length_budget"), o.path("word_length_budget"));
  if (o.has("incidence_budget")) c.incidence_budget = positive(o.at("incidence_budget"), o.path("incidence_budget"));
  if (o.has("node_budget")) c.cover.node_budget = positive(o.at("node_budget"), o.path("node_budget"));
  if (o.has("local_search_moves")) c.cover.local_search_moves = as_u64(o.at("local_search_moves"), o.path("local_search_moves"));
}

void parse_thresholds(const Json& j, const std::string& path, BoundednessThresholds& t) {
  Obj o(j, path, {"band", "slope", "min_points"});
  if (o.has("band")) {
    t.band = as_number(o.at("band"), o.path("band"));
    if (!(t.band >= 1.0)) bad(o.path("band"), "band must be >= 1");
  }
  if (o.has("slope")) {
    t.slope = as_number(o.at("slope"), o.path("slope"));
    if (!(t.slope > 0.0)) bad(o.path("slope"), "slope must be positive");
  }
  if (o.has("min_points")) {
    t.min_points = positive(o.at("min_points"), o.path("min_points"));
    if (t.min_points < 2) bad(o.path("min_points"), "need at least two points");
  }
}

void parse_ap(const Json& j, const std::string& path, ApOptions& a) {
  Obj o(j, path, {"radii", "epsilon_factors", "samples", "stable_fraction", "growth_factor"});
  if (o.has("radii")) {
    a.radii = ints(o.at("radii"), o.path("radii"));
    for (std::size_t i = 0; i < a.radii.size(); ++i) {
      if (a.radii[i] < 0) bad(item(o.path("radii"), i), "radii must be nonnegative");
      if (i > 0 && a.radii[i] <= a.radii[i - 1]) bad(item(o.path("radii"), i), "radii must be strictly ascending");
    }
    if (a.radii.size() < 2) bad(o.path("radii"), "need at least two radii");
  }
  if (o.has("epsilon_factors")) {
    a.epsilon_factors = numbers(o.at("epsilon_factors"), o.path("epsilon_factors"));
    for (std::size_t i = 0; i < a.epsilon_factors.size(); ++i)
      if (!(a.epsilon_factors[i] > 0.0)) bad(item(o.path("epsilon_factors"), i), "factors must be positive");
  }
  if (o.has("samples")) a.sample_count = positive(o.at("samples"), o.path("samples"));
  if (o.has("stable_fraction")) {
    a.stable_fraction = as_number(o.at("stable_fraction"), o.path("stable_fraction"));
    if (!(a.stable_fraction >= 0.0)) bad(o.path("stable_fraction"), "must be nonnegative");
  }
  if (o.has("growth_factor")) {
    a.growth_factor = as_number(o.at("growth_factor"), o.path("growth_factor"));
    if (!(a.growth_factor > 1.0)) bad(o.path("growth_factor"), "must exceed 1");
  }
}

void parse_equicont(const Json& j, const std::string& path, EquicontSettings& e) {
  Obj o(j, path, {"deltas", "n_max", "tau", "samples", "vanishing_ratio", "neighbors", "all_pairs_limit",
                  "pair_samples", "n0", "tempered_check_limit"});
  e.deltas = numbers(o.at("deltas"), o.path("deltas"));
  for (std::size_t i = 0; i < e.deltas.size(); ++i)
    if (!(e.deltas[i] > 0.0)) bad(item(o.path("deltas"), i), "deltas must be positive");
  require_ascending(e.deltas, o.path("deltas"));
  if (o.has("n_max")) e.n_max = static_cast<std::int64_t>(positive(o.at("n_max"), o.path("n_max")));
  if (o.has("tau")) {
    e.tau = as_number(o.at("tau"), o.path("tau"));
    if (!(e.tau > 0.0 && e.tau < 1.0)) bad(o.path("tau"), "must lie in (0,1)");
  }
  if (o.has("samples")) e.sample_count = positive(o.at("samples"), o.path("samples"));
  if (o.has("vanishing_ratio")) {
    e.vanishing_ratio = as_number(o.at("vanishing_ratio"), o.path("vanishing_ratio"));
    if (!(e.vanishing_ratio > 0.0 && e.vanishing_ratio < 1.0)) bad(o.path("vanishing_ratio"), "must lie in (0,1)");
  }
  if (o.has("neighbors")) e.core.neighbors = positive(o.at("neighbors"), o.path("neighbors"));
  if (o.has("all_pairs_limit")) e.modulus.all_pairs_limit = as_u64(o.at("all_pairs_limit"), o.path("all_pairs_limit"));
  if (o.has("pair_samples")) e.modulus.pair_samples = positive(o.at("pair_samples"), o.path("pair_samples"));
  if (o.has("n0")) {
    e.modulus.n0 = static_cast<std::int64_t>(positive(o.at("n0"), o.path("n0")));
    if (e.modulus.n0 > e.n_max) bad(o.path("n0"), "window start exceeds n_max");
  }
  if (o.has("tempered_check_limit"))
    e.tempered_check_limit = static_cast<std::int64_t>(positive(o.at("tempered_check_limit"), o.path("tempered_check_limit")));
}

Ratio parse_probability(const Json& j, const std::string& path) {
  const auto s = as_string(j, path);
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) bad(path, "expected a fraction such as \"1/2\"");
    std::size_t a = 0, b = 0;
    const auto num = std::stoll(s.substr(0, slash), &a);
    const auto den = std::stoll(s.substr(slash + 1), &b);
    if (a != slash || b != s.size() - slash - 1 || num <= 0 || den <= num)
      bad(path, "expected a fraction strictly between 0 and 1");
    return {num, den};
  } catch (const std::logic_error&) {
    bad(path, "expected a fraction such as \"1/2\"");
  }
}

const std::vector<std::pair<const char*, Theorem>> kTheorems{
    {"discrete-spectrum", Theorem::discrete_spectrum},
    {"almost-periodic", Theorem::almost_periodic},
    {"metric-robustness", Theorem::metric_robustness},
    {"equicontinuity", Theorem::equicontinuity},
    // short aliases; to_string returns the first name listed for each value
    {"T1.1(2-3-4)", Theorem::discrete_spectrum},
    {"T2.1", Theorem::almost_periodic},
    {"T3-metrics", Theorem::metric_robustness},
    {"T3-equicont", Theorem::equicontinuity},
};

const std::vector<std::pair<const char*, Pipeline>> kVerbs{
    {"check-tempered", Pipeline::check_tempered},     {"profile-complexity", Pipeline::profile_complexity},
    {"ap-test", Pipeline::ap_test},                   {"equicontinuity", Pipeline::equicontinuity},
    {"verify-theorem", Pipeline::verify_theorem},
};

}  // namespace

const char* to_string(Pipeline p) {
  for (const auto& [name, v] : kVerbs)
    if (v == p) return name;
  return "?";
}

std::optional<Pipeline> pipeline_from_verb(std::string_view verb) {
  for (const auto& [name, v] : kVerbs)
    if (verb == name) return v;
  return std::nullopt;
}

const char* to_string(Theorem t) {
  for (const auto& [name, v] : kTheorems)
    if (v == t) return name;
  return "?";
}

void ExperimentConfig::set_workers(int workers) {
  complexity.workers = workers;
  ap.workers = workers;
  equicont.complexity.workers = workers;
  equicont.modulus.workers = workers;
  equicont.core.workers = workers;
}

Json parse_json_text(std::string_view text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::config, origin + ": invalid JSON: " + e.what());
  }
}

ExperimentConfig parse_config(const Json& input, std::optional<std::uint64_t> seed_override,
                              std::optional<Pipeline> verb) {
  ExperimentConfig c;
  c.doc = input;
  if (seed_override) {
    if (!c.doc.is_object()) bad("$", "expected an object");
    c.doc["seed"] = *seed_override;
  }
  const Json& j = c.doc;
  Obj o(j, "$",
        {"name", "description", "pipeline", "theorem", "seed", "workers", "group", "system", "folner", "semimetric",
         "semimetrics", "observable", "n_grid", "eps_grid", "samples", "exact_words", "budgets", "thresholds",
         "tempered", "ap", "equicontinuity"});
  if (o.has("name")) c.name = as_string(o.at("name"), o.path("name"));
  if (o.has("description")) as_string(o.at("description"), o.path("description"));
  if (o.has("workers")) positive(o.at("workers"), o.path("workers"));

  if (o.has("pipeline")) {
    const auto p = pipeline_from_verb(as_string(o.at("pipeline"), o.path("pipeline")));
    if (!p) bad(o.path("pipeline"), "unknown pipeline");
    if (verb && *verb != *p) bad(o.path("pipeline"), std::string("config is for '") + to_string(*p) + "', not '" + to_string(*verb) + "'");
    c.pipeline = *p;
  } else if (verb) {
    c.pipeline = *verb;
  } else {
    bad(o.path("pipeline"), "required field is missing");
  }
  c.seed = as_u64(o.at("seed"), o.path("seed"));

  if (o.has("theorem")) {
    if (c.pipeline != Pipeline::verify_theorem) bad(o.path("theorem"), "only valid for verify-theorem");
    const auto t = as_string(o.at("theorem"), o.path("theorem"));
    for (const auto& [name, v] : kTheorems)
      if (t == name) c.theorem = v;
    if (!c.theorem) bad(o.path("theorem"), "unknown theorem '" + t + "'");
  } else if (c.pipeline == Pipeline::verify_theorem) {
    bad(o.path("theorem"), "required field is missing");
  }

  if (o.has("system")) {
    c.system = parse_system(o.at("system"), o.path("system"));
    c.group = c.system->group();
  }
  if (o.has("group")) {
    const auto g = parse_group(o.at("group"), o.path("group"));
    if (c.group && !(*c.group == g)) bad(o.path("group"), "does not match the system's group");
    c.group = g;
  }
  if (!c.group) bad(o.path("system"), "required field is missing");
  if (!c.system && c.pipeline != Pipeline::check_tempered) bad(o.path("system"), "required field is missing");

  c.folner = o.has("folner") ? parse_folner(o.at("folner"), o.path("folner"), *c.group)
                             : std::make_shared<FolnerSequence>(FolnerSequence::default_for(*c.group).group(),
                                                                FolnerSequence::default_for(*c.group).rule());

  if (o.has("n_grid")) {
    c.n_grid = ints(o.at("n_grid"), o.path("n_grid"));
    for (std::size_t i = 0; i < c.n_grid.size(); ++i) {
      if (c.n_grid[i] < 1) bad(item(o.path("n_grid"), i), "n must be >= 1");
      if (i > 0 && c.n_grid[i] <= c.n_grid[i - 1]) bad(item(o.path("n_grid"), i), "grid must be strictly ascending");
    }
  }
  if (o.has("eps_grid")) {
    c.eps_grid = numbers(o.at("eps_grid"), o.path("eps_grid"));
    require_open_unit(c.eps_grid, o.path("eps_grid"));
    require_ascending(c.eps_grid, o.path("eps_grid"));
  }
  if (o.has("n_grid") != o.has("eps_grid"))
    bad(o.path(o.has("n_grid") ? "eps_grid" : "n_grid"), "n_grid and eps_grid come together");
  if (o.has("samples")) c.samples = positive(o.at("samples"), o.path("samples"));
  if (o.has("budgets")) parse_budgets(o.at("budgets"), o.path("budgets"), c.complexity, c.ap);
  if (o.has("thresholds")) parse_thresholds(o.at("thresholds"), o.path("thresholds"), c.thresholds);
  if (o.has("tempered")) {
    Obj t(o.at("tempered"), o.path("tempered"), {"n_max", "constant"});
    if (t.has("n_max")) c.tempered.n_max = static_cast<std::int64_t>(positive(t.at("n_max"), t.path("n_max")));
    if (t.has("constant")) {
      c.tempered.constant = as_number(t.at("constant"), t.path("constant"));
      if (!(*c.tempered.constant >= 1.0)) bad(t.path("constant"), "must be >= 1");
    }
  }
  if (o.has("ap")) parse_ap(o.at("ap"), o.path("ap"), c.ap);
  c.ap.seed = c.seed;
  if (o.has("equicontinuity")) parse_equicont(o.at("equicontinuity"), o.path("equicontinuity"), c.equicont);
  c.equicont.seed = c.seed;

  if (c.system) {
    if (o.has("semimetric") && o.has("semimetrics")) bad(o.path("semimetrics"), "give semimetric or semimetrics, not both");
    if (o.has("semimetric"))
      c.semimetrics.push_back(parse_semimetric(o.at("semimetric"), o.path("semimetric"), *c.system));
    if (o.has("semimetrics")) {
      const auto& sj = as_array(o.at("semimetrics"), o.path("semimetrics"));
      for (std::size_t i = 0; i < sj.size(); ++i)
        c.semimetrics.push_back(parse_semimetric(sj[i], item(o.path("semimetrics"), i), *c.system));
    }
    if (o.has("observable")) c.observable = parse_observable(o.at("observable"), o.path("observable"), *c.system);
  } else {
    for (const char* k : {"semimetric", "semimetrics", "observable"})
      if (o.has(k)) bad(o.path(k), "needs a system");
  }
  if (o.has("exact_words")) {
    Obj w(o.at("exact_words"), o.path("exact_words"), {"p"});
    c.exact_words_p = parse_probability(w.at("p"), w.path("p"));
    const auto shift = dynamic_cast<const SubshiftSystem*>(c.system.get());
    if (!shift || shift->alphabet() != 2 || shift->dimension() != 1 ||
        !std::holds_alternative<SubshiftSystem::Bernoulli>(shift->measure()))
      bad(o.path("exact_words"), "word-space oracle needs a binary Bernoulli shift over Z");
  }

  // pipeline requirements
  const bool grids = !c.n_grid.empty();
  switch (c.pipeline) {
    case Pipeline::check_tempered: break;
    case Pipeline::profile_complexity:
      if (!grids) bad(o.path("n_grid"), "required field is missing");
      if (c.semimetrics.size() > 1) bad(o.path("semimetrics"), "profile-complexity takes a single semimetric");
      if (c.semimetrics.empty()) c.semimetrics.push_back(Semimetric::base());
      if (c.exact_words_p && c.semimetrics[0].kind() != Semimetric::Kind::partition_hamming)
        bad(o.path("exact_words"), "word-space oracle applies to the origin-cylinder Hamming semimetric");
      break;
    case Pipeline::ap_test:
      if (!c.observable) bad(o.path("observable"), "required field is missing");
      break;
    case Pipeline::equicontinuity:
      if (!o.has("equicontinuity")) bad(o.path("equicontinuity"), "required field is missing");
      break;
    case Pipeline::verify_theorem:
      if (!grids) bad(o.path("n_grid"), "required field is missing");
      switch (*c.theorem) {
        case Theorem::discrete_spectrum: {
          if (c.semimetrics.empty()) bad(o.path("semimetrics"), "required field is missing");
          bool base = false, hamming = false;
          for (std::size_t i = 0; i < c.semimetrics.size(); ++i) {
            const auto k = c.semimetrics[i].kind();
            if (k != Semimetric::Kind::base && k != Semimetric::Kind::partition_hamming)
              bad(item(o.path("semimetrics"), i), "discrete-spectrum compares base and partition Hamming semimetrics");
            base = base || k == Semimetric::Kind::base;
            hamming = hamming || k == Semimetric::Kind::partition_hamming;
          }
          if (!base || !hamming) bad(o.path("semimetrics"), "need the base metric and at least one partition");
          break;
        }
        case Theorem::almost_periodic:
          if (!c.observable) bad(o.path("observable"), "required field is missing");
          break;
        case Theorem::metric_robustness:
          if (c.semimetrics.size() < 2) bad(o.path("semimetrics"), "need at least two semimetrics");
          break;
        case Theorem::equicontinuity:
          if (!o.has("equicontinuity")) bad(o.path("equicontinuity"), "required field is missing");
          break;
      }
      break;
  }
  if (c.pipeline == Pipeline::check_tempered && c.tempered.n_max < 2) bad("$.tempered.n_max", "must be >= 2");
  if (o.has("workers")) c.set_workers(static_cast<int>(std::min<std::uint64_t>(as_u64(o.at("workers"), "$.workers"), 1024)));
  return c;
}

std::string config_sha256(const Json& doc) {
  Json d = doc;
  if (d.is_object()) d.erase("workers");
  const std::string text = d.dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorKind::setup, "SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace dspec
