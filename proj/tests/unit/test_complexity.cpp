#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "complexity.hpp"
#include "doctest.h"
#include "error.hpp"
#include "rng.hpp"

using namespace dspec;

namespace {

const double kGolden = 0.6180339887498949;

std::vector<std::uint32_t> identity_perm(std::uint32_t n) {
  std::vector<std::uint32_t> p(n);
  std::iota(p.begin(), p.end(), 0u);
  return p;
}

FiniteSystem identity_system(std::uint32_t n) {
  return FiniteSystem(GroupSpec::lattice(1), {identity_perm(n)}, std::vector<std::int64_t>(n, 1),
                      FiniteSystem::discrete_metric(n));
}

// Random permutation, weights constant on its cycles, line metric from random
// positions (ties with eps/2 have probability zero).
FiniteSystem random_system(std::uint64_t seed, std::uint32_t n) {
  KeyedStream rs(seed, 0);
  std::vector<std::uint32_t> p = identity_perm(n);
  for (std::uint32_t i = n; i > 1; --i) std::swap(p[i - 1], p[rs.next() % i]);
  std::vector<std::int64_t> w(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (w[i] != 0) continue;
    const std::int64_t c = 1 + static_cast<std::int64_t>(rs.next() % 4);
    for (std::uint32_t j = i; w[j] == 0; j = p[j]) w[j] = c;
  }
  std::vector<double> a(n);
  for (auto& v : a) v = rs.uniform();
  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j) d[i][j] = std::abs(a[i] - a[j]);
  return FiniteSystem(GroupSpec::lattice(1), {p}, w, d);
}

// Brute force over center subsets; mean distances summed along the orbit
// independently of the engine; eps is given as eps_pct / 100.
std::size_t brute_complexity(const FiniteSystem& F, std::int64_t n, int eps_pct) {
  const std::uint32_t N = static_cast<std::uint32_t>(F.atom_count());
  const auto& p = F.permutations()[0];
  std::vector<std::vector<double>> dbar(N, std::vector<double>(N, 0.0));
  for (std::uint32_t i = 0; i < N; ++i)
    for (std::uint32_t j = 0; j < N; ++j) {
      double s = 0.0;
      std::uint32_t x = i, y = j;
      for (std::int64_t g = 0; g < n; ++g, x = p[x], y = p[y]) s += F.distance()[x][y];
      dbar[i][j] = s / static_cast<double>(n);
    }
  const double r = eps_pct / 200.0;
  const auto& w = F.atom_weights();
  const std::int64_t total = F.weight_total();
  for (std::size_t m = 1; m <= N; ++m) {
    std::vector<int> pick(N, 0);
    std::fill(pick.end() - static_cast<std::ptrdiff_t>(m), pick.end(), 1);
    do {
      std::int64_t covered = 0;
      for (std::uint32_t y = 0; y < N; ++y)
        for (std::uint32_t c = 0; c < N; ++c)
          if (pick[c] && dbar[c][y] < r) {
            covered += w[y];
            break;
          }
      if (covered * 100 > total * (100 - eps_pct)) return m;
    } while (std::next_permutation(pick.begin(), pick.end()));
  }
  return N;
}

ComplexityProfile synthetic(const std::vector<std::size_t>& sizes, const std::vector<std::size_t>& values,
                            const std::vector<std::size_t>& lowers) {
  ComplexityProfile p;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    ProfileRow r;
    r.n = static_cast<std::int64_t>(i + 1);
    r.folner_size = sizes[i];
    r.epsilon = 0.2;
    r.upper = values[i];
    r.lower = lowers[i];
    p.rows.push_back(r);
  }
  return p;
}

}  // namespace

TEST_CASE("exact complexity on small identity systems") {
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  // each ball holds mass 1/2 and the threshold is strict
  CHECK(complexity_exact(identity_system(2), Semimetric::base(), seq, 1, 0.5) == 2);
  CHECK(complexity_exact(identity_system(2), Semimetric::base(), seq, 1, 1.2) == 1);
  CHECK(complexity_exact(identity_system(4), Semimetric::base(), seq, 1, 0.3) == 3);
  // boundary: three singletons give exactly 3/4 = 1 - eps, which is not enough
  CHECK(complexity_exact(identity_system(4), Semimetric::base(), seq, 1, 0.25) == 4);
  CHECK(complexity_exact(identity_system(4), Semimetric::base(), seq, 1, 0.26) == 3);
}

TEST_CASE("exact complexity matches brute force") {
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  for (std::uint64_t s = 0; s < 25; ++s) {
    const auto F = random_system(s, 3 + static_cast<std::uint32_t>(s % 8));
    for (std::int64_t n : {1, 3, 8})
      for (int e : {10, 25, 40, 70}) {
        CAPTURE(s);
        CAPTURE(n);
        CAPTURE(e);
        CHECK(complexity_exact(F, Semimetric::base(), seq, n, e / 100.0) == brute_complexity(F, n, e));
      }
  }
}

TEST_CASE("exact complexity is nonincreasing in eps") {
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  for (std::uint64_t s = 100; s < 110; ++s) {
    const auto F = random_system(s, 10);
    std::size_t prev = SIZE_MAX;
    for (double e : {0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 0.8}) {
      const auto c = complexity_exact(F, Semimetric::base(), seq, 4, e);
      CHECK(c <= prev);
      prev = c;
    }
  }
}

TEST_CASE("atom budget is enforced") {
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  ComplexityOptions opt;
  opt.atom_budget = 5;
  CHECK_THROWS_AS(complexity_exact(identity_system(6), Semimetric::base(), seq, 1, 0.3, opt), Error);
}

TEST_CASE("sandwich on random finite systems") {
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  for (std::uint64_t s = 200; s < 240; ++s) {
    const auto F = random_system(s, 2 + static_cast<std::uint32_t>(s % 11));
    for (std::int64_t n : {1, 2, 5, 16})
      for (double e : {0.1, 0.2, 0.4}) {
        const auto lo = packing_lower(F, Semimetric::base(), seq, n, e, s, 100);
        const auto ex = complexity_exact(F, Semimetric::base(), seq, n, e);
        const auto up = complexity_greedy_upper(F, Semimetric::base(), seq, n, e, s, 100);
        CHECK(lo.rigorous);
        CHECK(lo.count <= ex);
        CHECK(ex <= up.count);
        CHECK(up.covered_mass > 1.0 - e);
        CHECK(std::set<std::size_t>(up.center_indices.begin(), up.center_indices.end()).size() == up.count);
      }
  }
}

TEST_CASE("packing lower bound examples") {
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  CHECK(packing_lower(identity_system(2), Semimetric::base(), seq, 1, 0.5, 1, 100).count == 2);
  CHECK(packing_lower(identity_system(1), Semimetric::base(), seq, 1, 0.5, 1, 100).count == 1);
  TorusSystem T(GroupSpec::lattice(1), 1, {{kGolden}});
  const auto p = packing_lower(T, Semimetric::base(), seq, 8, 0.2, 3, 2000);
  CHECK(!p.rigorous);
  CHECK(p.count >= 4);
}

TEST_CASE("rotation greedy count does not depend on n") {
  TorusSystem T(GroupSpec::lattice(1), 1, {{kGolden}});
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  const auto base = complexity_greedy_upper(T, Semimetric::base(), seq, 16, 0.2, 7, 2000);
  CHECK(base.count <= 10);
  for (std::int64_t n : {64, 256}) {
    const auto r = complexity_greedy_upper(T, Semimetric::base(), seq, n, 0.2, 7, 2000);
    CHECK(r.count == base.count);
    CHECK(r.center_indices == base.center_indices);
  }
}

TEST_CASE("greedy needs enough samples and is worker independent") {
  TorusSystem T(GroupSpec::lattice(1), 2, {{kGolden, 0.1}});
  SubshiftSystem S(1, 2, SubshiftSystem::Bernoulli{{0.5, 0.5}});
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  CHECK_THROWS_AS(complexity_greedy_upper(T, Semimetric::base(), seq, 4, 0.2, 1, 50), Error);
  ComplexityOptions one, many;
  many.workers = 4;
  const auto w = Semimetric::hamming(Partition::cylinder(S));
  const auto a = complexity_greedy_upper(S, w, seq, 12, 0.3, 5, 1500, one);
  const auto b = complexity_greedy_upper(S, w, seq, 12, 0.3, 5, 1500, many);
  CHECK(a.center_indices == b.center_indices);
}

TEST_CASE("word space exact values") {
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  CHECK(complexity_words_exact(Ratio{1, 2}, seq, 1, 0.6) == 1);
  CHECK(complexity_words_exact(Ratio{1, 2}, seq, 5, 1.0) == 1);
  // radius 0.8 < 1 leaves singletons: more than 0.6 * 16 words are needed
  CHECK(complexity_words_exact(Ratio{1, 2}, seq, 4, 0.4) == 10);
  // radius 1.2: balls of 7 words; 39 of 64 words must be covered, ceil(39/7) = 6
  CHECK(complexity_words_exact(Ratio{1, 2}, seq, 6, 0.4) == 6);
  CHECK(complexity_words_exact(Ratio{1, 2}, seq, 8, 0.4) == 18);
  ComplexityOptions opt;
  opt.word_length_budget = 6;
  CHECK_THROWS_AS(complexity_words_exact(Ratio{1, 2}, seq, 7, 0.4, opt), Error);
}

TEST_CASE("boundedness diagnostic") {
  const std::vector<std::size_t> sizes{16, 32, 64, 128, 256};
  SUBCASE("flat profile is bounded") {
    const auto r = boundedness_diagnostic(synthetic(sizes, {8, 9, 8, 8, 9}, {4, 4, 4, 4, 4}));
    CHECK(r.verdict == Verdict::bounded);
  }
  SUBCASE("geometric growth confirmed by lower bounds") {
    const auto r = boundedness_diagnostic(synthetic(sizes, {4, 8, 16, 32, 64}, {2, 4, 8, 16, 32}));
    CHECK(r.verdict == Verdict::growing);
    CHECK(r.fits[0].slope == doctest::Approx(1.0));
  }
  SUBCASE("growth without lower confirmation") {
    const auto r = boundedness_diagnostic(synthetic(sizes, {4, 8, 16, 32, 64}, {1, 1, 1, 1, 1}));
    CHECK(r.verdict == Verdict::inconclusive);
  }
  SUBCASE("two points are not enough") {
    const auto r = boundedness_diagnostic(synthetic({16, 32}, {4, 4}, {4, 4}));
    CHECK(r.verdict == Verdict::inconclusive);
  }
  SUBCASE("finite spaces are bounded") {
    auto p = synthetic({16, 32}, {4, 9}, {1, 1});
    p.finite_space = true;
    p.atom_count = 9;
    CHECK(boundedness_diagnostic(p).verdict == Verdict::bounded);
  }
}

TEST_CASE("profile rows keep lower <= exact <= upper") {
  const auto F = random_system(77, 9);
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  const auto prof = complexity_profile(F, Semimetric::base(), seq, {1, 2, 4, 8, 16}, {0.1, 0.3}, 3, 100);
  CHECK(prof.finite_space);
  CHECK(prof.rows.size() == 10);
  for (const auto& r : prof.rows) {
    REQUIRE(r.exact.has_value());
    CHECK(r.lower <= *r.exact);
    CHECK(*r.exact <= r.upper);
  }
  CHECK(boundedness_diagnostic(prof).verdict == Verdict::bounded);
}

TEST_CASE("uniform cells for the identity action") {
  // atoms at 0, 0.1, 0.5, 0.55, 0.9: eps = 0.2 merges {0,1} and {2,3}
  const std::vector<double> a{0.0, 0.1, 0.5, 0.55, 0.9};
  std::vector<std::vector<double>> d(5, std::vector<double>(5));
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) d[i][j] = std::abs(a[i] - a[j]);
  FiniteSystem F(GroupSpec::lattice(1), {identity_perm(5)}, {1, 1, 1, 1, 1}, d);
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  const auto cells = uniform_cell_check(F, Semimetric::base(), seq, 0.2, {1, 2, 4, 8}, 5);
  REQUIRE(cells.has_value());
  CHECK(cells->cells.size() == 3);
  CHECK(cells->mass > 0.8);
}

TEST_CASE("uniform cells for a cyclic rotation") {
  const std::uint32_t N = 10;
  std::vector<std::uint32_t> p(N);
  for (std::uint32_t i = 0; i < N; ++i) p[i] = (i + 1) % N;
  FiniteSystem F(GroupSpec::lattice(1), {p}, std::vector<std::int64_t>(N, 1), FiniteSystem::cyclic_metric(N));
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  // arcs of at most three atoms have diameter 0.2 < 0.3; eight atoms are needed
  const auto cells = uniform_cell_check(F, Semimetric::base(), seq, 0.3, {1, 2, 4, 8, 16}, 8);
  REQUIRE(cells.has_value());
  CHECK(cells->cells.size() == 3);
  std::set<std::size_t> seen;
  for (const auto& c : cells->cells)
    for (auto x : c) CHECK(seen.insert(x).second);
  CHECK(seen.size() >= 8);
}

TEST_CASE("uniform cells fail below resolution") {
  const std::uint32_t N = 12;
  std::vector<std::uint32_t> p{5, 9, 0, 11, 2, 7, 1, 10, 4, 3, 6, 8};
  FiniteSystem F(GroupSpec::lattice(1), {p}, std::vector<std::int64_t>(N, 1), FiniteSystem::discrete_metric(N));
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  CHECK_FALSE(uniform_cell_check(F, Semimetric::base(), seq, 0.2, {1, 2, 4, 8}, 5).has_value());
  CHECK(uniform_cell_check(F, Semimetric::base(), seq, 0.2, {1, 2, 4, 8}, 12).has_value());
}

TEST_CASE("robustness on a finite system agrees trivially") {
  const auto F = random_system(5, 8);
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  const auto rep = metric_robustness_check(
      F, seq, {Semimetric::base(), Semimetric::hamming(Partition::atom_labels({0, 1, 0, 1, 0, 1, 0, 1}))},
      {1, 2, 4, 8, 16}, {0.2}, 1, 100);
  CHECK(rep.agree);
  CHECK_FALSE(rep.conclusive_conflict);
  for (const auto& r : rep.reports) CHECK(r.verdict == Verdict::bounded);
}
