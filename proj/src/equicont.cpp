#include "equicont.hpp"

#include <algorithm>
#include <numeric>

#include "error.hpp"
#include "exact.hpp"
#include "orbit_table.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace dspec {

namespace {

struct ClosePair {
  std::uint32_t i = 0, j = 0;
  double d = 0.0;      // base distance
  double value = 0.0;  // max mean distance over the window
};

FolnerSet identity_set(const DynamicalSystem& sys) { return FolnerSet({sys.group().identity()}); }

}  // namespace

Core core_select(const DynamicalSystem& sys, const Semimetric& w, const FolnerSequence& seq, std::int64_t score_n,
                 std::uint64_t seed, std::size_t sample_count, double tau, const CoreOptions& opt) {
  require(tau > 0.0 && tau < 1.0, ErrorKind::input, "tau must lie in (0,1)");
  require(opt.neighbors >= 1, ErrorKind::input, "core score needs at least one neighbour");
  const auto mp = measure_points(sys, seed, sample_count);
  const std::size_t N = mp.points.size();
  Core core;
  core.exact = mp.exact;
  core.total = mp.total;
  core.tau = tau;
  core.seed = seed;
  core.sample_count = N;

  // oscillation score: largest w-bar over the k nearest base neighbours
  std::vector<double> score(N, 0.0);
  if (N > 1) {
    const auto id = identity_set(sys);
    const OrbitTable base(sys, Semimetric::base(), id, mp.points, opt.workers);
    const OrbitTable mean(sys, w, *seq.set(score_n), mp.points, opt.workers);
    const std::size_t k = std::min(opt.neighbors, N - 1);
    parallel_for(N, opt.workers, [&](std::size_t i) {
      std::vector<std::pair<double, std::size_t>> d;
      d.reserve(N - 1);
      for (std::size_t j = 0; j < N; ++j)
        if (j != i) d.emplace_back(base.distance(i, j), j);
      std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
      double s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s = std::max(s, mean.distance(i, d[t].second));
      score[i] = s;
    });
  }
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (mp.weight[a] != mp.weight[b]) return mp.weight[a] < mp.weight[b];
    return score[a] > score[b];
  });
  // dropped weight stays strictly below tau * total
  const std::int64_t allowance = max_integer_below(mp.total, tau);
  std::vector<char> dropped(N, 0);
  std::int64_t gone = 0;
  for (auto i : order) {
    if (gone + mp.weight[i] > allowance) break;
    gone += mp.weight[i];
    dropped[i] = 1;
  }
  for (std::size_t i = 0; i < N; ++i) {
    if (dropped[i]) continue;
    core.points.push_back(mp.points[i]);
    core.indices.push_back(i);
    core.weight.push_back(mp.weight[i]);
  }
  core.mass = static_cast<double>(mp.total - gone) / static_cast<double>(mp.total);
  return core;
}

const char* to_string(ModulusMode m) { return m == ModulusMode::all_n ? "all_n" : "limsup_proxy"; }

ModulusReport equicontinuity_modulus(const DynamicalSystem& sys, const Semimetric& w, const Core& core,
                                     const FolnerSequence& seq, const std::vector<double>& deltas,
                                     std::int64_t n_max, ModulusMode mode, const ModulusOptions& opt) {
  require(!deltas.empty(), ErrorKind::input, "modulus needs a delta grid");
  require(std::is_sorted(deltas.begin(), deltas.end()) && deltas.front() > 0.0, ErrorKind::input,
          "deltas must be positive and ascending");
  require(n_max >= 1, ErrorKind::input, "n_max must be >= 1");
  ModulusReport rep;
  rep.mode = mode;
  rep.semimetric = w.describe();
  rep.deltas = deltas;
  rep.core_mass = core.mass;
  rep.n_max = n_max;
  rep.n0 = mode == ModulusMode::all_n ? 1 : (opt.n0 > 0 ? opt.n0 : std::max<std::int64_t>(1, n_max / 4));
  require(rep.n0 <= n_max, ErrorKind::input, "window start exceeds n_max");

  const std::size_t M = core.points.size();
  const double dmax = deltas.back();
  const auto id = identity_set(sys);
  const OrbitTable base(sys, Semimetric::base(), id, core.points, opt.workers);

  // close pairs: all pairs of a small core, seeded pairs otherwise
  std::vector<ClosePair> pairs;
  if (M <= opt.all_pairs_limit) {
    std::vector<std::vector<ClosePair>> rows(M);
    parallel_for(M, opt.workers, [&](std::size_t i) {
      for (std::size_t j = i + 1; j < M; ++j) {
        const double d = base.distance(i, j);
        if (d < dmax) rows[i].push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), d, 0.0});
      }
    });
    for (auto& r : rows) pairs.insert(pairs.end(), r.begin(), r.end());
  } else {
    KeyedStream rs(opt.seed, 0x9a125);
    for (std::size_t t = 0; t < opt.pair_samples; ++t) {
      const auto i = static_cast<std::uint32_t>(rs.next() % M);
      const auto j = static_cast<std::uint32_t>(rs.next() % M);
      if (i == j) continue;
      const double d = base.distance(i, j);
      if (d < dmax) pairs.push_back({std::min(i, j), std::max(i, j), d, 0.0});
    }
  }

  // window sets; nested families reuse one table through prefix means
  const auto top = seq.set(n_max);
  std::vector<std::int64_t> ns;
  for (std::int64_t n = rep.n0; n <= n_max; ++n) ns.push_back(n);
  bool nested = true;
  std::vector<std::size_t> prefixes;
  for (auto n : ns) {
    const auto s = seq.set(n);
    nested = nested && s->size() <= top->size() &&
             std::equal(s->begin(), s->end(), top->begin());
    prefixes.push_back(s->size());
  }
  if (nested) {
    std::sort(prefixes.begin(), prefixes.end());
    prefixes.erase(std::unique(prefixes.begin(), prefixes.end()), prefixes.end());
    const OrbitTable table(sys, w, *top, core.points, opt.workers);
    parallel_for(pairs.size(), opt.workers, [&](std::size_t p) {
      std::vector<double> out(prefixes.size());
      table.prefix_distances(pairs[p].i, pairs[p].j, prefixes, out);
      pairs[p].value = *std::max_element(out.begin(), out.end());
    });
  } else {
    for (auto n : ns) {
      const OrbitTable table(sys, w, *seq.set(n), core.points, opt.workers);
      parallel_for(pairs.size(), opt.workers, [&](std::size_t p) {
        pairs[p].value = std::max(pairs[p].value, table.distance(pairs[p].i, pairs[p].j));
      });
    }
  }

  for (double delta : deltas) {
    std::optional<double> m;
    double bsup = 0.0;
    std::size_t used = 0;
    for (const auto& p : pairs) {
      if (!(p.d < delta)) continue;
      ++used;
      m = std::max(m.value_or(0.0), p.value);
      bsup = std::max(bsup, p.d);
    }
    rep.modulus.push_back(m);
    rep.base_sup.push_back(bsup);
    rep.pairs_used.push_back(used);
  }
  return rep;
}

const char* to_string(ModulusClass c) {
  switch (c) {
    case ModulusClass::vanishing: return "vanishing";
    case ModulusClass::floored: return "floored";
    case ModulusClass::inconclusive: return "inconclusive";
  }
  return "?";
}

ModulusClass classify_modulus(const ModulusReport& rep, double ratio) {
  if (rep.modulus.empty() || !rep.modulus.front() || !rep.modulus.back()) return ModulusClass::inconclusive;
  const double lo = *rep.modulus.front(), hi = *rep.modulus.back();
  if (hi == 0.0 || lo < ratio * hi) return ModulusClass::vanishing;
  return ModulusClass::floored;
}

EquicontCrosscheck equicontinuity_crosscheck(const DynamicalSystem& sys, const FolnerSequence& seq,
                                             const EquicontSettings& s) {
  EquicontCrosscheck r;
  try {
    r.tempered_constant = temperedness_profile(seq, std::min(s.n_max, s.tempered_check_limit)).max_ratio;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::resource) throw;
  }
  const auto w = Semimetric::base();
  r.core = core_select(sys, w, seq, s.n_max, s.seed, s.sample_count, s.tau, s.core);
  ModulusOptions mo = s.modulus;
  mo.seed = s.seed;
  r.limsup = mean_equicontinuity_modulus(sys, w, r.core, seq, s.deltas, s.n_max, mo);
  r.all_n = equicont_in_mean_modulus(sys, w, r.core, seq, s.deltas, s.n_max, mo);
  r.limsup_class = classify_modulus(r.limsup, s.vanishing_ratio);
  r.all_n_class = classify_modulus(r.all_n, s.vanishing_ratio);
  r.profile = complexity_profile(sys, w, seq, s.n_grid, s.eps_grid, s.seed, s.complexity_samples, s.complexity);
  r.boundedness = boundedness_diagnostic(r.profile, s.thresholds);

  const bool finite = sys.space_kind() == SpaceKind::finite;
  const bool equi = finite || (r.limsup_class == ModulusClass::vanishing && r.all_n_class == ModulusClass::vanishing);
  const bool non_equi = !finite && r.limsup_class == ModulusClass::floored && r.all_n_class == ModulusClass::floored;
  const bool bounded = r.boundedness.verdict == Verdict::bounded;
  const bool growing = r.boundedness.verdict == Verdict::growing;
  r.agree = (equi && bounded) || (non_equi && growing);
  r.conclusive_conflict = (equi && growing) || (non_equi && bounded);
  if (finite)
    r.reason = "finite state space: equicontinuous and bounded";
  else if (r.agree)
    r.reason = equi ? "moduli vanish and complexity is bounded" : "moduli floored and complexity grows";
  else if (r.conclusive_conflict)
    r.reason = "modulus classification contradicts the complexity verdict";
  else
    r.reason = "at least one classification is inconclusive or the two moduli disagree";
  return r;
}

}  // namespace dspec
