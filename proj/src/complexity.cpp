#include "complexity.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <numeric>

#include "error.hpp"
#include "parallel.hpp"

namespace dspec {

const char* to_string(CoverMode m) {
  switch (m) {
    case CoverMode::greedy_upper: return "greedy_upper";
    case CoverMode::exact: return "exact";
    case CoverMode::packing_lower: return "packing_lower";
  }
  return "";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::bounded: return "bounded";
    case Verdict::growing: return "growing";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_epsilon(double eps) {
  require(std::isfinite(eps) && eps > 0.0, ErrorKind::input, "epsilon must be a positive finite number");
}

void check_pairing(const DynamicalSystem& sys, const FolnerSequence& seq) {
  require(seq.group() == sys.group(), ErrorKind::input, "Følner sequence and system use different groups");
}

CoverInstance ball_instance(const NeighborGraph& G, double r, const WeightedPoints& wp) {
  CoverInstance inst;
  inst.weight = wp.weight;
  G.ball_lists(r, inst.set_offset, inst.set_items);
  return inst;
}

CoveringResult greedy_from(const NeighborGraph& G, const WeightedPoints& wp, std::int64_t n, double eps,
                           std::uint64_t seed) {
  const CoverInstance inst = ball_instance(G, eps / 2.0, wp);
  const CoverSolution sol = greedy_cover(inst, max_integer_below(wp.total, eps));
  CoveringResult res;
  res.mode = CoverMode::greedy_upper;
  res.n = n;
  res.epsilon = eps;
  res.count = sol.sets.size();
  for (auto s : sol.sets) {
    res.center_indices.push_back(s);
    res.centers.push_back(wp.points[s]);
  }
  res.covered_mass = static_cast<double>(wp.total - sol.uncovered) / static_cast<double>(wp.total);
  res.exact_measure = wp.exact;
  res.sample_count = wp.exact ? 0 : wp.points.size();
  res.seed = seed;
  return res;
}

PackingResult packing_from(const OrbitTable& table, const NeighborGraph& G, const WeightedPoints& wp, double eps) {
  const std::size_t N = wp.points.size();
  PackingResult res;
  if (wp.exact) {
    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return wp.weight[a] > wp.weight[b]; });
    std::vector<std::size_t> P;
    for (auto a : order) {
      bool separated = true;
      for (auto p : P)
        if (table.distance_below(a, p, eps) < eps) {
          separated = false;
          break;
        }
      if (separated) P.push_back(a);
    }
    // P members whose uncovered total could stay below eps: the lightest ones
    const std::int64_t budget = max_integer_below(wp.total, eps);
    std::int64_t acc = 0;
    std::size_t j = 0;
    for (auto it = P.rbegin(); it != P.rend(); ++it) {
      if (acc + wp.weight[*it] > budget) break;
      acc += wp.weight[*it];
      ++j;
    }
    res.separated = P.size();
    res.count = std::max<std::size_t>(1, P.size() - j);
    res.rigorous = true;
    return res;
  }
  // empirical core: drop the sparsest samples (eps/2-ball counts) below mass eps
  std::vector<std::int64_t> density(N, 0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t e = G.offset[i]; e < G.offset[i + 1]; ++e)
      if (G.dist[e] < eps / 2.0) density[i] += wp.weight[G.target[e]];
  std::vector<std::size_t> core(N);
  std::iota(core.begin(), core.end(), 0);
  std::stable_sort(core.begin(), core.end(), [&](std::size_t a, std::size_t b) { return density[a] > density[b]; });
  const std::int64_t drop = std::max<std::int64_t>(0, max_integer_below(static_cast<std::int64_t>(N), eps));
  core.resize(N - static_cast<std::size_t>(std::min<std::int64_t>(drop, static_cast<std::int64_t>(N))));
  if (core.empty()) {
    res.count = 1;
    return res;
  }
  // farthest-first traversal while the farthest point is at least eps away
  std::vector<double> nearest(core.size(), kInf);
  std::size_t next = 0;
  std::size_t chosen = 0;
  while (true) {
    ++chosen;
    const std::size_t p = core[next];
    nearest[next] = 0.0;
    for (std::size_t k = 0; k < core.size(); ++k) {
      if (nearest[k] == 0.0) continue;
      const double d = table.distance_below(core[k], p, nearest[k]);
      if (d < nearest[k]) nearest[k] = d;
    }
    next = static_cast<std::size_t>(std::max_element(nearest.begin(), nearest.end()) - nearest.begin());
    if (!(nearest[next] >= eps)) break;
  }
  res.separated = chosen;
  res.count = chosen;
  return res;
}

struct Level {
  std::shared_ptr<const FolnerSet> F;
  std::unique_ptr<OrbitTable> table;
  NeighborGraph graph;
};

Level build_level(const DynamicalSystem& sys, const Semimetric& w, const FolnerSequence& seq, std::int64_t n,
                  const WeightedPoints& wp, double radius, int workers) {
  Level L;
  L.F = seq.set(n);
  L.table = std::make_unique<OrbitTable>(sys, w, *L.F, wp.points, workers);
  L.graph = build_neighbor_graph(*L.table, radius, workers);
  return L;
}

}  // namespace

WeightedPoints measure_points(const DynamicalSystem& sys, std::uint64_t seed, std::size_t sample_count) {
  WeightedPoints wp;
  if (sys.has_exact_measure()) {
    wp.points = sys.atoms();
    wp.weight = sys.atom_weights();
    wp.total = sys.weight_total();
    wp.exact = true;
    return wp;
  }
  require(sample_count >= 1, ErrorKind::input, "sample count must be positive");
  wp.points = sys.sample(seed, sample_count);
  wp.weight.assign(sample_count, 1);
  wp.total = static_cast<std::int64_t>(sample_count);
  return wp;
}

CoveringResult complexity_greedy_upper(const DynamicalSystem& sys, const Semimetric& w, const FolnerSequence& seq,
                                       std::int64_t n, double epsilon, std::uint64_t seed, std::size_t sample_count,
                                       const ComplexityOptions& opt) {
  check_epsilon(epsilon);
  check_pairing(sys, seq);
  require(sys.has_exact_measure() || sample_count >= 100, ErrorKind::input, "greedy estimator needs >= 100 samples");
  const auto wp = measure_points(sys, seed, sample_count);
  const Level L = build_level(sys, w, seq, n, wp, epsilon / 2.0, opt.workers);
  return greedy_from(L.graph, wp, n, epsilon, seed);
}

std::size_t complexity_exact(const DynamicalSystem& sys, const Semimetric& w, const FolnerSequence& seq,
                             std::int64_t n, double epsilon, const ComplexityOptions& opt) {
  check_epsilon(epsilon);
  check_pairing(sys, seq);
  require(sys.has_exact_measure(), ErrorKind::unsupported, "exact complexity needs a finite system with exact measure");
  require(sys.atom_count() <= opt.atom_budget, ErrorKind::resource,
          "exact complexity: " + std::to_string(sys.atom_count()) + " atoms exceed the budget of " +
              std::to_string(opt.atom_budget));
  const auto wp = measure_points(sys, 0, 0);
  const Level L = build_level(sys, w, seq, n, wp, epsilon / 2.0, opt.workers);
  const CoverInstance inst = ball_instance(L.graph, epsilon / 2.0, wp);
  return exact_cover(inst, max_integer_below(wp.total, epsilon), opt.cover).value;
}

std::size_t complexity_words_exact(Ratio p, const FolnerSequence& seq, std::int64_t n, double epsilon,
                                   const ComplexityOptions& opt) {
  check_epsilon(epsilon);
  require(seq.group().kind() == GroupKind::lattice, ErrorKind::unsupported, "word-space complexity needs a lattice");
  require(p.den >= 1 && p.num >= 0 && p.num <= p.den, ErrorKind::input, "bernoulli parameter must lie in [0,1]");
  const auto F = seq.set(n);
  const std::size_t L = F->size();
  require(L <= opt.word_length_budget && L <= 30, ErrorKind::resource,
          "word space too large: |F_n| = " + std::to_string(L));
  // exact product measure: weight(x) = num^ones (den - num)^zeros, total den^L
  std::vector<std::int64_t> pa(L + 1, 1), pb(L + 1, 1);
  for (std::size_t i = 1; i <= L; ++i) {
    require(pa[i - 1] <= INT64_MAX / 4 / std::max<std::int64_t>(p.den, 1), ErrorKind::resource,
            "word measure denominator overflows");
    pa[i] = pa[i - 1] * p.num;
    pb[i] = pb[i - 1] * (p.den - p.num);
  }
  std::int64_t total = 1;
  for (std::size_t i = 0; i < L; ++i) {
    require(total <= INT64_MAX / 4 / p.den, ErrorKind::resource, "word measure denominator overflows");
    total *= p.den;
  }
  // Hamming radius: k / L < eps / 2, in the same arithmetic as the orbit tables
  std::size_t R = 0;
  while (R + 1 <= L && static_cast<double>(R + 1) / static_cast<double>(L) < epsilon / 2.0) ++R;
  const std::uint32_t words = std::uint32_t{1} << L;
  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = 0; m < words; ++m)
    if (static_cast<std::size_t>(std::popcount(m)) <= R) masks.push_back(m);
  require(static_cast<double>(words) * static_cast<double>(masks.size()) <= static_cast<double>(opt.incidence_budget),
          ErrorKind::resource, "word-space ball incidence exceeds budget");
  CoverInstance inst;
  inst.weight.resize(words);
  for (std::uint32_t x = 0; x < words; ++x) {
    const auto ones = static_cast<std::size_t>(std::popcount(x));
    inst.weight[x] = pa[ones] * pb[L - ones];
  }
  inst.set_items.reserve(static_cast<std::size_t>(words) * masks.size());
  inst.set_offset.reserve(words + 1);
  std::vector<std::uint32_t> ball(masks.size());
  for (std::uint32_t x = 0; x < words; ++x) {
    for (std::size_t k = 0; k < masks.size(); ++k) ball[k] = x ^ masks[k];
    inst.add_set(ball);
  }
  return exact_cover(inst, max_integer_below(total, epsilon), opt.cover).value;
}

PackingResult packing_lower(const DynamicalSystem& sys, const Semimetric& w, const FolnerSequence& seq, std::int64_t n,
                            double epsilon, std::uint64_t seed, std::size_t sample_count,
                            const ComplexityOptions& opt) {
  check_epsilon(epsilon);
  check_pairing(sys, seq);
  const auto wp = measure_points(sys, seed, sample_count);
  const Level L = build_level(sys, w, seq, n, wp, epsilon / 2.0, opt.workers);
  return packing_from(*L.table, L.graph, wp, epsilon);
}

ComplexityProfile complexity_profile(const DynamicalSystem& sys, const Semimetric& w, const FolnerSequence& seq,
                                     const std::vector<std::int64_t>& n_grid, const std::vector<double>& eps_grid,
                                     std::uint64_t seed, std::size_t sample_count, const ComplexityOptions& opt) {
  check_pairing(sys, seq);
  require(!n_grid.empty() && !eps_grid.empty(), ErrorKind::input, "profile grids must be nonempty");
  for (double e : eps_grid) check_epsilon(e);
  std::vector<double> eps = eps_grid;
  std::sort(eps.begin(), eps.end());
  ComplexityProfile prof;
  prof.system = sys.describe();
  prof.semimetric = w.describe();
  prof.finite_space = sys.has_exact_measure();
  prof.atom_count = sys.atom_count();
  const auto wp = measure_points(sys, seed, sample_count);
  const bool exact = wp.exact && wp.points.size() <= opt.atom_budget;
  using clock = std::chrono::steady_clock;
  for (std::int64_t n : n_grid) {
    const auto t0 = clock::now();
    const Level L = build_level(sys, w, seq, n, wp, eps.back() / 2.0, opt.workers);
    const double shared_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    for (double e : eps) {
      const auto t1 = clock::now();
      ProfileRow row;
      row.n = n;
      row.folner_size = L.F->size();
      row.epsilon = e;
      row.upper = greedy_from(L.graph, wp, n, e, seed).count;
      const PackingResult pk = packing_from(*L.table, L.graph, wp, e);
      row.lower = pk.count;
      row.lower_rigorous = pk.rigorous;
      if (exact) {
        const CoverInstance inst = ball_instance(L.graph, e / 2.0, wp);
        row.exact = exact_cover(inst, max_integer_below(wp.total, e), opt.cover).value;
      }
      row.samples = wp.exact ? 0 : wp.points.size();
      row.seed = seed;
      row.runtime_ms = shared_ms / static_cast<double>(eps.size()) +
                       std::chrono::duration<double, std::milli>(clock::now() - t1).count();
      prof.rows.push_back(row);
    }
  }
  return prof;
}

BoundednessReport boundedness_diagnostic(const ComplexityProfile& profile, const BoundednessThresholds& t) {
  BoundednessReport rep;
  rep.thresholds = t;
  std::vector<double> eps;
  for (const auto& r : profile.rows)
    if (std::find(eps.begin(), eps.end(), r.epsilon) == eps.end()) eps.push_back(r.epsilon);
  std::sort(eps.begin(), eps.end());
  bool any_growing = false, all_bounded = !eps.empty();
  for (double e : eps) {
    std::vector<const ProfileRow*> rows;
    for (const auto& r : profile.rows)
      if (r.epsilon == e) rows.push_back(&r);
    std::stable_sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->folner_size < b->folner_size; });
    EpsilonFit fit;
    fit.epsilon = e;
    fit.points = rows.size();
    std::vector<double> xs, ys;
    double lo = kInf, hi = 0.0;
    for (auto* r : rows) {
      const double v = static_cast<double>(r->exact.value_or(r->upper));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      xs.push_back(std::log(static_cast<double>(r->folner_size)));
      ys.push_back(std::log(v));
    }
    fit.ratio = rows.empty() ? 0.0 : hi / lo;
    if (rows.size() >= 2) {
      const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
      const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
      }
      fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
      const auto& first = *rows.front();
      const auto& last = *rows.back();
      const std::size_t last_lower = last.exact.value_or(last.lower);
      fit.lower_confirms = last_lower > first.exact.value_or(first.upper);
    }
    if (rows.size() < t.min_points)
      fit.verdict = Verdict::inconclusive;
    else if (fit.ratio <= t.band)
      fit.verdict = Verdict::bounded;
    else if (fit.slope > t.slope && fit.lower_confirms)
      fit.verdict = Verdict::growing;
    else
      fit.verdict = Verdict::inconclusive;
    any_growing = any_growing || fit.verdict == Verdict::growing;
    all_bounded = all_bounded && fit.verdict == Verdict::bounded;
    rep.fits.push_back(fit);
  }
  if (profile.finite_space) {
    rep.verdict = Verdict::bounded;
    rep.reason = "finite state space: C <= " + std::to_string(profile.atom_count) + " for every n";
  } else if (any_growing) {
    rep.verdict = Verdict::growing;
    rep.reason = "log-log slope above threshold with lower bounds confirming growth";
  } else if (all_bounded) {
    rep.verdict = Verdict::bounded;
    rep.reason = "upper bounds within band across the n grid for every epsilon";
  } else {
    rep.verdict = Verdict::inconclusive;
    rep.reason = "insufficient data or neither rule applies";
  }
  return rep;
}

namespace {

// Bron–Kerbosch with pivoting over 64-bit adjacency masks.
void maximal_cliques(const std::vector<std::uint64_t>& adj, std::uint64_t R, std::uint64_t P, std::uint64_t X,
                     std::vector<std::uint64_t>& out, std::size_t budget) {
  if (P == 0 && X == 0) {
    require(out.size() < budget, ErrorKind::resource, "uniform cell check: clique budget exceeded");
    out.push_back(R);
    return;
  }
  const std::uint64_t PX = P | X;
  int pivot = std::countr_zero(PX);
  int best = -1;
  for (std::uint64_t m = PX; m != 0; m &= m - 1) {
    const int u = std::countr_zero(m);
    const int c = std::popcount(P & adj[static_cast<std::size_t>(u)]);
    if (c > best) {
      best = c;
      pivot = u;
    }
  }
  for (std::uint64_t m = P & ~adj[static_cast<std::size_t>(pivot)]; m != 0; m &= m - 1) {
    const int v = std::countr_zero(m);
    const std::uint64_t bit = std::uint64_t{1} << v;
    maximal_cliques(adj, R | bit, P & adj[static_cast<std::size_t>(v)], X & adj[static_cast<std::size_t>(v)], out,
                    budget);
    P &= ~bit;
    X |= bit;
  }
}

}  // namespace

std::optional<CellDecomposition> uniform_cell_check(const DynamicalSystem& sys, const Semimetric& w,
                                                    const FolnerSequence& seq, double epsilon,
                                                    const std::vector<std::int64_t>& n_values,
                                                    std::size_t cell_budget, const ComplexityOptions& opt) {
  check_epsilon(epsilon);
  check_pairing(sys, seq);
  require(sys.has_exact_measure(), ErrorKind::unsupported, "uniform cell check needs a finite exact system");
  require(!n_values.empty(), ErrorKind::input, "uniform cell check needs at least one n");
  const std::size_t N = sys.atom_count();
  require(N <= 64, ErrorKind::resource, "uniform cell check supports at most 64 atoms");
  const auto wp = measure_points(sys, 0, 0);
  // compatible: w-bar_{F_n}(a, b) < eps for every tested n
  std::vector<std::uint64_t> adj(N, 0);
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b)
      if (a != b) adj[a] |= std::uint64_t{1} << b;
  for (std::int64_t n : n_values) {
    const auto F = seq.set(n);
    const OrbitTable table(sys, w, *F, wp.points, opt.workers);
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = a + 1; b < N; ++b)
        if (!(table.distance_below(a, b, epsilon) < epsilon)) {
          adj[a] &= ~(std::uint64_t{1} << b);
          adj[b] &= ~(std::uint64_t{1} << a);
        }
  }
  std::vector<std::uint64_t> cliques;
  const std::uint64_t all = N == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << N) - 1;
  maximal_cliques(adj, 0, all, 0, cliques, 1'000'000);
  CoverInstance inst;
  inst.weight = wp.weight;
  std::vector<std::uint32_t> items;
  for (auto c : cliques) {
    items.clear();
    for (std::uint64_t m = c; m != 0; m &= m - 1) items.push_back(static_cast<std::uint32_t>(std::countr_zero(m)));
    inst.add_set(items);
  }
  const auto res = exact_cover(inst, max_integer_below(wp.total, epsilon), opt.cover);
  if (res.value > cell_budget) return std::nullopt;
  CellDecomposition out;
  out.total = wp.total;
  std::uint64_t taken = 0;
  for (auto s : res.witness.sets) {
    std::vector<std::size_t> cell;
    for (auto e : inst.items(s))
      if (!(taken >> e & 1)) {
        cell.push_back(e);
        taken |= std::uint64_t{1} << e;
        out.weight += wp.weight[e];
      }
    if (!cell.empty()) out.cells.push_back(std::move(cell));
  }
  out.mass = static_cast<double>(out.weight) / static_cast<double>(out.total);
  return out;
}

RobustnessReport metric_robustness_check(const DynamicalSystem& sys, const FolnerSequence& seq,
                                         const std::vector<Semimetric>& metrics, const std::vector<std::int64_t>& n_grid,
                                         const std::vector<double>& eps_grid, std::uint64_t seed,
                                         std::size_t sample_count, const ComplexityOptions& opt,
                                         const BoundednessThresholds& t) {
  require(metrics.size() >= 2, ErrorKind::input, "metric robustness needs at least two semimetrics");
  RobustnessReport rep;
  rep.seed = seed;
  bool bounded = false, growing = false, inconclusive = false;
  for (const auto& w : metrics) {
    rep.semimetrics.push_back(w.describe());
    rep.profiles.push_back(complexity_profile(sys, w, seq, n_grid, eps_grid, seed, sample_count, opt));
    rep.reports.push_back(boundedness_diagnostic(rep.profiles.back(), t));
    const Verdict v = rep.reports.back().verdict;
    bounded = bounded || v == Verdict::bounded;
    growing = growing || v == Verdict::growing;
    inconclusive = inconclusive || v == Verdict::inconclusive;
  }
  rep.conclusive_conflict = bounded && growing;
  rep.agree = !inconclusive && !rep.conclusive_conflict;
  return rep;
}

}  // namespace dspec
