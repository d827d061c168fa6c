#include <cmath>
#include <numbers>

#include "doctest.h"
#include "error.hpp"
#include "rng.hpp"
#include "spectrum.hpp"

using namespace dspec;

namespace {

const double kGolden = 0.6180339887498949;

FiniteSystem cyclic8() {
  std::vector<std::uint32_t> p(8);
  for (std::uint32_t i = 0; i < 8; ++i) p[i] = (i + 1) % 8;
  return FiniteSystem(GroupSpec::finite_abelian({8}), {p}, std::vector<std::int64_t>(8, 1),
                      FiniteSystem::cyclic_metric(8));
}

// Z/8 acting by a 4-cycle on each of two blocks.
FiniteSystem two_blocks() {
  std::vector<std::uint32_t> p{1, 2, 3, 0, 5, 6, 7, 4};
  return FiniteSystem(GroupSpec::finite_abelian({8}), {p}, std::vector<std::int64_t>(8, 3),
                      FiniteSystem::discrete_metric(8));
}

Rational random_rational(KeyedStream& rs, long long range) {
  const long long num = static_cast<long long>(rs.next() % (2 * range + 1)) - range;
  return Rational(num, 1 + static_cast<long long>(rs.next() % 7));
}

}  // namespace

TEST_CASE("cyclotomic arithmetic") {
  const auto z = Cyclotomic16::zeta(1);
  auto p = Cyclotomic16(1);
  for (int i = 0; i < 16; ++i) p = p * z;
  CHECK(p == Cyclotomic16(1));
  CHECK(Cyclotomic16::zeta(8) == Cyclotomic16(-1));
  CHECK(Cyclotomic16::zeta(4) * Cyclotomic16::zeta(4) == Cyclotomic16(-1));
  CHECK(Cyclotomic16::zeta(3).conj() == Cyclotomic16::zeta(-3));
  CHECK(Cyclotomic16::zeta(5).norm2() == Cyclotomic16(1));
  // sqrt(2) = zeta^2 + zeta^-2
  const auto r2 = Cyclotomic16::zeta(2) + Cyclotomic16::zeta(-2);
  CHECK(r2 * r2 == Cyclotomic16(2));
  CHECK((r2 - Cyclotomic16(Rational(141, 100))).real_sign() == 1);
  CHECK((r2 - Cyclotomic16(Rational(142, 100))).real_sign() == -1);
  CHECK((r2 * r2 - Cyclotomic16(2)).real_sign() == 0);
  CHECK_THROWS_AS(Cyclotomic16::zeta(1).real_sign(), Error);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      const auto m = root_difference_modulus(a, b);
      CHECK(m.is_real());
      CHECK(m * m == (Cyclotomic16::zeta(2 * a) - Cyclotomic16::zeta(2 * b)).norm2());
      CHECK(m.real_sign() >= 0);
      CHECK(m.approx().real() == doctest::Approx(std::abs(std::polar(1.0, std::numbers::pi * a / 4) -
                                                          std::polar(1.0, std::numbers::pi * b / 4))));
    }
}

TEST_CASE("L2 distance examples") {
  SubshiftSystem S(1, 2, SubshiftSystem::Bernoulli{{0.5, 0.5}});
  const auto h = Observable::origin_indicator(S);
  CHECK(l2_distance(S, h, h, 1, 500).value == 0.0);
  CHECK(l2_distance(S, Observable::constant(1.0), Observable::constant(0.0), 1, 500).value == 1.0);
  for (std::int64_t k : {1, 5, -3}) {
    const auto d = l2_distance(S, h, compose(S, h, GroupElement{k}), 7, 20000);
    CHECK(std::abs(d.value - std::sqrt(0.5)) <= 3.0 * d.std_error);
    CHECK(d.std_error > 0.0);
  }
}

TEST_CASE("orbit nets") {
  TorusSystem T(GroupSpec::lattice(1), 1, {{kGolden}});
  SubshiftSystem S(1, 2, SubshiftSystem::Bernoulli{{0.5, 0.5}});
  CHECK(orbit_net_size(T, Observable::constant(2.0), 32, 0.1, 1, 64) == 1);
  const auto chi = Observable::torus_character({1});
  // an eps-separated set on the unit circle has at most 2 pi / eps points
  std::size_t prev = 0;
  for (std::int64_t r : {4, 16, 64, 256}) {
    const auto s = orbit_net_size(T, chi, r, 0.1, 1, 64);
    CHECK(s <= static_cast<std::size_t>(std::ceil(2 * std::numbers::pi / 0.1)));
    CHECK(s >= prev);
    prev = s;
  }
  // indicator shifts are pairwise sqrt(1/2) apart
  for (std::int64_t r : {2, 8, 20}) CHECK(orbit_net_size(S, Observable::origin_indicator(S), r, 0.5, 3, 512) == 2 * r + 1);
}

TEST_CASE("orbit net monotonicity") {
  TorusSystem T(GroupSpec::lattice(1), 1, {{kGolden}});
  const auto orbit = orbit_samples(T, Observable::torus_sin(), 200, 5, 256);
  std::size_t prev = SIZE_MAX;
  for (double eps : {0.02, 0.05, 0.1, 0.2, 0.4}) {
    const auto n = orbit_net(orbit, eps).size();
    CHECK(n <= prev);
    prev = n;
  }
}

TEST_CASE("Gram effective rank") {
  TorusSystem T(GroupSpec::lattice(1), 1, {{kGolden}});
  SubshiftSystem S(1, 2, SubshiftSystem::Bernoulli{{0.5, 0.5}});
  for (std::int64_t r : {2, 8, 32}) {
    const auto g = orbit_gram(orbit_samples(T, Observable::torus_character({1}), r, 1, 256));
    CHECK(gram_effective_rank(g, 1e-3) == 1);
    CHECK(g.diag_max - g.diag_min <= 3 * g.diag_std_error + 1e-12);
    CHECK(gram_effective_rank(orbit_gram(orbit_samples(T, Observable::constant(1.0), r, 1, 64)), 1e-3) == 1);
  }
  const auto g = orbit_gram(orbit_samples(S, Observable::origin_indicator(S), 8, 2, 4096));
  CHECK(gram_effective_rank(g, 1e-3) == 17);
  CHECK(g.diag_max - g.diag_min <= 6 * g.diag_std_error);
  // (1/4) J + (1/4) I up to sampling error
  CHECK(std::abs(g.gram(0, 3).real() - 0.25) < 0.05);
  CHECK(std::abs(g.gram(4, 4).real() - 0.5) < 0.05);
  L2OrbitGram bad;
  bad.gram = Eigen::MatrixXcd::Identity(2, 2);
  bad.gram(0, 1) = bad.gram(1, 0) = 2.0;
  CHECK_THROWS_AS(gram_effective_rank(bad, 1e-3), Error);
}

TEST_CASE("mean bound lemma") {
  const auto F = cyclic8();
  SUBCASE("zero observable") {
    const auto r = lemma_mean_bound_check(F, std::vector<Rational>(8, 0), 1, 2);
    CHECK(r.hypothesis);
    CHECK(r.holds);
    CHECK(r.slack == r.bound);
    CHECK(r.bound == Rational(3, 2) + 1);
  }
  SUBCASE("two values") {
    const Rational c(1, 100);
    std::vector<Rational> h{c, -c, c, -c, c, -c, c, -c};
    const auto r = lemma_mean_bound_check(F, h, c, 2);
    CHECK(r.hypothesis);
    CHECK(r.double_integral == c);
    CHECK(r.bound == (2 + c) / 2 + c);
    CHECK(r.holds);
  }
  SUBCASE("vacuous cases") {
    std::vector<Rational> h{1, 0, 0, 0, 0, 0, 0, 0};
    CHECK_FALSE(lemma_mean_bound_check(F, h, 1, 2).hypothesis);  // mean 1/8
    CHECK_FALSE(lemma_mean_bound_check(F, std::vector<Rational>(8, 0), 1, 1).hypothesis);
    CHECK(lemma_mean_bound_check(F, h, 1, 2).holds);
  }
  SUBCASE("random instances") {
    KeyedStream rs(42, 0);
    int tested = 0;
    for (int t = 0; t < 100; ++t) {
      const std::size_t N = 2 + rs.next() % 9;
      std::vector<std::vector<std::uint32_t>> perm{{}};
      for (std::uint32_t i = 0; i < N; ++i) perm[0].push_back(static_cast<std::uint32_t>(i));
      std::vector<std::int64_t> w(N);
      for (auto& x : w) x = 1 + static_cast<std::int64_t>(rs.next() % 5);
      const FiniteSystem sys(GroupSpec::lattice(1), perm, w, FiniteSystem::discrete_metric(N));
      std::vector<Rational> h(N);
      Rational mean = 0, total = 0;
      for (std::size_t x = 0; x < N; ++x) {
        h[x] = random_rational(rs, 5) / 1000;
        mean += h[x] * w[x];
        total += w[x];
      }
      for (auto& v : h) v -= mean / total;
      Rational C = 0;
      for (const auto& v : h) C = std::max(C, Rational(abs(v)));
      C += Rational(1, 1 + static_cast<long long>(rs.next() % 50));
      const auto probe = lemma_mean_bound_check(sys, h, C, 2);
      // largest k of the form 1 + j/8 with D k^2 < 1
      Rational k = 1;
      for (long long j = 1; j < 4000; ++j) {
        const Rational kk = 1 + Rational(j, 8);
        if (!(probe.double_integral * kk * kk < 1)) break;
        k = kk;
      }
      if (k == 1) continue;
      const auto r = lemma_mean_bound_check(sys, h, C, k);
      CHECK(r.hypothesis);
      CHECK(r.holds);
      CHECK(r.slack >= 0);
      ++tested;
    }
    CHECK(tested >= 90);
  }
}

TEST_CASE("character basis") {
  const auto F = cyclic8();
  const auto basis = character_basis(F);
  REQUIRE(basis.size() == 8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) {
      Cyclotomic16 s;
      for (std::size_t x = 0; x < 8; ++x) s = s + basis[i][x] * basis[j][x].conj();
      CHECK(s == Cyclotomic16(i == j ? 8 : 0));
    }
  CHECK(character_basis(two_blocks()).size() == 8);
  const FiniteSystem lattice(GroupSpec::lattice(1), {{1, 0}}, {1, 1}, FiniteSystem::discrete_metric(2));
  CHECK_THROWS_AS(character_basis(lattice), Error);
}

TEST_CASE("basis bound on the cyclic shift") {
  const auto F = cyclic8();
  const auto basis = character_basis(F);
  SUBCASE("each basis vector") {
    for (const auto& e : basis) {
      const auto r = basis_bound_check(F, {e}, e);
      CHECK(r.holds);
      CHECK(r.triples == 512);
    }
  }
  SUBCASE("zero function") {
    const auto r = basis_bound_check(F, basis, std::vector<Cyclotomic16>(8));
    CHECK(r.holds);
    CHECK(r.equalities == 512);  // both sides vanish
  }
  SUBCASE("random combinations") {
    KeyedStream rs(9, 9);
    for (int t = 0; t < 40; ++t) {
      std::vector<std::vector<Cyclotomic16>> sub;
      std::vector<Cyclotomic16> f(8);
      for (const auto& e : basis) {
        if (rs.next() % 2 && !(sub.empty() && &e == &basis.back())) continue;
        const auto c = Cyclotomic16::gaussian(random_rational(rs, 9), random_rational(rs, 9));
        sub.push_back(e);
        for (std::size_t x = 0; x < 8; ++x) f[x] = f[x] + c * e[x];
      }
      const auto r = basis_bound_check(F, sub, f);
      CHECK(r.holds);
      CHECK(r.witness.empty());
    }
  }
  SUBCASE("two orbits") {
    const auto B = two_blocks();
    const auto cb = character_basis(B);
    std::vector<Cyclotomic16> f(8);
    for (std::size_t i = 0; i < cb.size(); ++i)
      for (std::size_t x = 0; x < 8; ++x) f[x] = f[x] + Cyclotomic16(static_cast<long long>(i) - 3) * cb[i][x];
    CHECK(basis_bound_check(B, cb, f).holds);
  }
  SUBCASE("setup failures") {
    // indicator of atom 0 is not an invariant line
    std::vector<Cyclotomic16> delta(8);
    delta[0] = 1;
    CHECK_THROWS_AS(basis_bound_check(F, {delta}, delta), Error);
    // not orthogonal
    CHECK_THROWS_AS(basis_bound_check(F, {basis[0], basis[0]}, basis[0]), Error);
    // f outside the span
    CHECK_THROWS_AS(basis_bound_check(F, {basis[1]}, basis[2]), Error);
  }
}
