#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "equicont.hpp"
#include "error.hpp"
#include "rng.hpp"

using namespace dspec;

namespace {

const double kGolden = 0.6180339887498949;

FiniteSystem shuffled(std::uint64_t seed, std::uint32_t n, std::vector<std::int64_t> w = {}) {
  KeyedStream rs(seed, 1);
  std::vector<std::uint32_t> p(n);
  for (std::uint32_t i = 0; i < n; ++i) p[i] = i;
  for (std::uint32_t i = n; i > 1; --i) std::swap(p[i - 1], p[rs.next() % i]);
  if (w.empty()) w.assign(n, 1);
  std::vector<double> a(n);
  for (auto& v : a) v = rs.uniform();
  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j) d[i][j] = std::abs(a[i] - a[j]);
  return FiniteSystem(GroupSpec::lattice(1), {p}, w, d);
}

}  // namespace

TEST_CASE("core keeps mass above 1 - tau") {
  TorusSystem T(GroupSpec::lattice(1), 1, {{kGolden}});
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  const auto c = core_select(T, Semimetric::base(), seq, 16, 3, 500, 0.05);
  // ceil(0.05 * 500) - 1 = 24 samples go
  CHECK(c.points.size() == 476);
  CHECK(c.mass > 0.95);
  CHECK(std::is_sorted(c.indices.begin(), c.indices.end()));
  const auto full = core_select(T, Semimetric::base(), seq, 16, 3, 500, 1e-6);
  CHECK(full.points.size() == 500);
  CHECK(full.mass == 1.0);
  CHECK_THROWS_AS(core_select(T, Semimetric::base(), seq, 16, 3, 500, 1.0), Error);
}

TEST_CASE("exact core drops the lightest atoms") {
  // cycles (0 1) (2 3 4) (5) carry weights 1, 2, 5: total 13
  const FiniteSystem F(GroupSpec::lattice(1), {{1, 0, 3, 4, 2, 5}}, {1, 1, 2, 2, 2, 5},
                       FiniteSystem::discrete_metric(6));
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  // tau = 0.2: dropped weight < 2.6, so atoms 0 and 1 (weight 2) go and an atom of weight 2 would exceed
  const auto c = core_select(F, Semimetric::base(), seq, 4, 1, 100, 0.2);
  CHECK(c.exact);
  CHECK(c.indices == std::vector<std::size_t>{2, 3, 4, 5});
  CHECK(c.mass == doctest::Approx(11.0 / 13.0));
  // tau = 0.4: allowance 5 (< 5.2) drops 0, 1 and one weight-2 atom
  CHECK(core_select(F, Semimetric::base(), seq, 4, 1, 100, 0.4).points.size() == 3);
}

TEST_CASE("rotation moduli equal the base supremum") {
  TorusSystem T(GroupSpec::lattice(1), 2, {{kGolden, 0.4142135623730951}});
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  const auto core = core_select(T, Semimetric::base(), seq, 64, 5, 800, 0.05);
  const std::vector<double> deltas{0.01, 0.02, 0.05, 0.1};
  const auto lim = mean_equicontinuity_modulus(T, Semimetric::base(), core, seq, deltas, 64);
  const auto all = equicont_in_mean_modulus(T, Semimetric::base(), core, seq, deltas, 64);
  CHECK(lim.n0 == 16);
  CHECK(all.n0 == 1);
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    REQUIRE(lim.modulus[k].has_value());
    CHECK(*lim.modulus[k] == lim.base_sup[k]);
    CHECK(*all.modulus[k] == all.base_sup[k]);
    CHECK(*lim.modulus[k] < deltas[k]);
    CHECK(*lim.modulus[k] > 0.5 * deltas[k]);
    if (k > 0) CHECK(*lim.modulus[k] >= *lim.modulus[k - 1]);
  }
  CHECK(classify_modulus(lim) == ModulusClass::vanishing);
  CHECK(classify_modulus(all) == ModulusClass::vanishing);
}

TEST_CASE("finite moduli match an exhaustive oracle") {
  const auto F = shuffled(11, 9);
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  const auto core = core_select(F, Semimetric::base(), seq, 12, 1, 100, 0.01);
  REQUIRE(core.points.size() == 9);
  const std::vector<double> deltas{0.1, 0.2, 0.4, 0.8};
  const std::int64_t n_max = 12;
  const auto& p = F.permutations()[0];
  const auto& d = F.distance();
  for (auto mode : {ModulusMode::limsup_proxy, ModulusMode::all_n}) {
    const auto rep = equicontinuity_modulus(F, Semimetric::base(), core, seq, deltas, n_max, mode);
    const std::int64_t n0 = mode == ModulusMode::all_n ? 1 : 3;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
      std::optional<double> oracle;
      for (std::uint32_t x = 0; x < 9; ++x)
        for (std::uint32_t y = x + 1; y < 9; ++y) {
          if (!(d[x][y] < deltas[k])) continue;
          double s = 0.0, best = 0.0;
          std::uint32_t a = x, b = y;
          for (std::int64_t n = 1; n <= n_max; ++n, a = p[a], b = p[b]) {
            s += d[a][b];
            if (n >= n0) best = std::max(best, s / static_cast<double>(n));
          }
          oracle = std::max(oracle.value_or(0.0), best);
        }
      CAPTURE(k);
      REQUIRE(rep.modulus[k].has_value() == oracle.has_value());
      if (oracle) CHECK(*rep.modulus[k] == doctest::Approx(*oracle).epsilon(1e-12));
    }
  }
}

TEST_CASE("all_n dominates the tail window and grows with n_max") {
  SubshiftSystem S(1, 2, SubshiftSystem::Bernoulli{{0.5, 0.5}}, 8);
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  const auto core = core_select(S, Semimetric::base(), seq, 32, 2, 600, 0.05);
  const std::vector<double> deltas{0.1, 0.3, 0.6};
  const auto lim = mean_equicontinuity_modulus(S, Semimetric::base(), core, seq, deltas, 32);
  const auto all16 = equicont_in_mean_modulus(S, Semimetric::base(), core, seq, deltas, 16);
  const auto all32 = equicont_in_mean_modulus(S, Semimetric::base(), core, seq, deltas, 32);
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    REQUIRE(all32.modulus[k].has_value());
    CHECK(*all32.modulus[k] >= *lim.modulus[k]);
    CHECK(*all32.modulus[k] >= *all16.modulus[k]);
  }
  // close pairs decorrelate under the shift
  CHECK(classify_modulus(lim) == ModulusClass::floored);
  CHECK(classify_modulus(all32) == ModulusClass::floored);
  CHECK(*lim.modulus[0] > 0.5);
}

TEST_CASE("absent entries") {
  TorusSystem T(GroupSpec::lattice(1), 1, {{kGolden}});
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  const auto core = core_select(T, Semimetric::base(), seq, 8, 1, 20, 0.01);
  const auto rep = mean_equicontinuity_modulus(T, Semimetric::base(), core, seq, {1e-9, 0.5}, 8);
  CHECK_FALSE(rep.modulus[0].has_value());
  CHECK(rep.pairs_used[0] == 0);
  CHECK(classify_modulus(rep) == ModulusClass::inconclusive);
  CHECK_THROWS_AS(mean_equicontinuity_modulus(T, Semimetric::base(), core, seq, {0.5, 0.1}, 8), Error);
}

TEST_CASE("finite crosscheck agrees trivially") {
  const auto F = shuffled(3, 10);
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  EquicontSettings s;
  s.deltas = {0.05, 0.2};
  s.n_max = 16;
  s.n_grid = {1, 2, 4, 8, 16};
  s.eps_grid = {0.2};
  const auto r = equicontinuity_crosscheck(F, seq, s);
  CHECK(r.agree);
  CHECK(r.tempered_constant.has_value());
  CHECK(r.boundedness.verdict == Verdict::bounded);
}
