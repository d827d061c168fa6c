#include <array>
#include <set>

#include "doctest.h"
#include "error.hpp"
#include "folner.hpp"
#include "group.hpp"
#include "rng.hpp"

using namespace dspec;

namespace {

using Mat3 = std::array<std::array<std::int64_t, 3>, 3>;

// (a,b,c) <-> [[1,a,c],[0,1,b],[0,0,1]]
Mat3 to_matrix(const GroupElement& g) { return {{{1, g[0], g[2]}, {0, 1, g[1]}, {0, 0, 1}}}; }

Mat3 mat_mul(const Mat3& x, const Mat3& y) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += x[i][k] * y[k][j];
  return r;
}

GroupElement random_element(const GroupSpec& G, KeyedStream& rs, std::int64_t span = 50) {
  std::vector<std::int64_t> c(G.rank());
  for (auto& v : c) v = static_cast<std::int64_t>(rs.next() % (2 * span + 1)) - span;
  return G.element(c);
}

}  // namespace

TEST_CASE("lattice multiply is componentwise") {
  const auto Z2 = GroupSpec::lattice(2);
  CHECK(Z2.multiply(Z2.element({1, 2}), Z2.element({3, -1})) == Z2.element({4, 1}));
}

TEST_CASE("heisenberg product matches unipotent matrices") {
  const auto H = GroupSpec::heisenberg3();
  CHECK(H.multiply(H.element({1, 0, 0}), H.element({0, 1, 0})) == H.element({1, 1, 1}));
  CHECK(H.multiply(H.element({0, 1, 0}), H.element({1, 0, 0})) == H.element({1, 1, 0}));
  KeyedStream rs(7, 0);
  for (int t = 0; t < 2000; ++t) {
    const auto g = random_element(H, rs), h = random_element(H, rs);
    const auto prod = H.multiply(g, h);
    CHECK(to_matrix(prod) == mat_mul(to_matrix(g), to_matrix(h)));
    CHECK(to_matrix(H.multiply(g, H.inverse(g))) == to_matrix(H.identity()));
  }
}

TEST_CASE("group axioms on random triples") {
  for (const auto& G : {GroupSpec::lattice(1), GroupSpec::lattice(3), GroupSpec::heisenberg3()}) {
    KeyedStream rs(11, G.rank());
    const auto e = G.identity();
    for (int t = 0; t < 10000; ++t) {
      const auto a = random_element(G, rs), b = random_element(G, rs), c = random_element(G, rs);
      REQUIRE(G.multiply(G.multiply(a, b), c) == G.multiply(a, G.multiply(b, c)));
      REQUIRE(G.multiply(e, a) == a);
      REQUIRE(G.multiply(a, e) == a);
      REQUIRE(G.multiply(a, G.inverse(a)) == e);
      REQUIRE(G.multiply(G.inverse(a), a) == e);
    }
  }
}

TEST_CASE("group axioms exhaustively on small finite abelian groups") {
  for (const auto& moduli : std::vector<std::vector<std::int64_t>>{{1}, {8}, {2, 4}, {3, 5}, {2, 2, 2}, {4, 4, 4}}) {
    const auto G = GroupSpec::finite_abelian(moduli);
    const auto els = G.elements();
    REQUIRE(els.size() == G.order());
    REQUIRE(els.size() <= 64);
    for (const auto& a : els) {
      CHECK(G.multiply(a, G.inverse(a)) == G.identity());
      for (const auto& b : els)
        for (const auto& c : els) REQUIRE(G.multiply(G.multiply(a, b), c) == G.multiply(a, G.multiply(b, c)));
    }
  }
}

TEST_CASE("finite abelian residues are reduced") {
  const auto G = GroupSpec::finite_abelian({5, 3});
  CHECK(G.element({7, -1}) == GroupElement{2, 2});
  CHECK(G.multiply(G.element({4, 2}), G.element({3, 2})) == GroupElement{2, 1});
}

TEST_CASE("mismatched elements are input errors") {
  const auto Z2 = GroupSpec::lattice(2);
  const auto Z3 = GroupSpec::lattice(3);
  try {
    Z2.multiply(Z2.element({1, 2}), Z3.element({1, 2, 3}));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::input);
  }
  CHECK_THROWS_AS(GroupSpec::finite_abelian({0}), Error);
  CHECK_THROWS_AS(GroupSpec::lattice(0), Error);
}

TEST_CASE("boxes") {
  FolnerSequence Z(GroupSpec::lattice(1), BoxesRule{});
  const auto F3 = Z.set(3);
  REQUIRE(F3->size() == 3);
  CHECK((*F3)[0] == GroupElement{0});
  CHECK((*F3)[2] == GroupElement{2});
  FolnerSequence Z2(GroupSpec::lattice(2), BoxesRule{});
  const auto F2 = Z2.set(2);
  CHECK(F2->size() == 4);
  CHECK(F2->elements() == std::vector<GroupElement>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  CHECK(Z.set(3).get() == F3.get());
  CHECK_THROWS_AS(Z.set(0), Error);
}

TEST_CASE("heisenberg word ball of radius 1") {
  const auto H = GroupSpec::heisenberg3();
  FolnerSequence seq(H, WordBallsRule{{}, SizeRule::identity()});
  const auto F1 = seq.set(1);
  const std::set<GroupElement> expected{{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
  CHECK(std::set<GroupElement>(F1->begin(), F1->end()) == expected);
  // breadth-first oracle: products of at most two generators
  const auto gens = H.standard_generators();
  std::set<GroupElement> two{H.identity()};
  for (const auto& a : gens) {
    two.insert(a);
    for (const auto& b : gens) two.insert(H.multiply(a, b));
  }
  const auto F2 = seq.set(2);
  CHECK(std::set<GroupElement>(F2->begin(), F2->end()) == two);
}

TEST_CASE("full group only on finite groups") {
  CHECK_THROWS_AS(FolnerSequence(GroupSpec::lattice(1), FullGroupRule{}), Error);
  FolnerSequence seq(GroupSpec::finite_abelian({2, 3}), FullGroupRule{});
  CHECK(seq.set(5)->size() == 6);
}

TEST_CASE("folner defect") {
  FolnerSequence Z(GroupSpec::lattice(1), BoxesRule{});
  for (std::int64_t n = 1; n <= 64; ++n) {
    const Ratio r = folner_defect(Z, n, GroupElement{1});
    CHECK(r == Ratio{2, n});
    CHECK(folner_defect(Z, n, GroupElement{0}) == Ratio{0, 1});
  }
  CHECK(folner_defect(Z, 10, GroupElement{1}).value() == doctest::Approx(0.2));

  FolnerSequence Z2(GroupSpec::lattice(2), BoxesRule{});
  // enumeration oracle
  const auto F = Z2.set(10);
  std::set<GroupElement> shifted, base(F->begin(), F->end());
  for (const auto& g : *F) shifted.insert(GroupElement{g[0] + 1, g[1]});
  std::size_t sym = 0;
  for (const auto& g : shifted) sym += base.count(g) == 0;
  for (const auto& g : base) sym += shifted.count(g) == 0;
  CHECK(sym == 20);
  CHECK(folner_defect(Z2, 10, GroupElement{1, 0}) == Ratio{20, 100});
}

TEST_CASE("folner defect symmetric under inversion") {
  const auto H = GroupSpec::heisenberg3();
  FolnerSequence seq(H, WordBallsRule{{}, SizeRule::identity()});
  KeyedStream rs(3, 3);
  for (int t = 0; t < 50; ++t) {
    const auto g = random_element(H, rs, 3);
    const std::int64_t n = 1 + static_cast<std::int64_t>(rs.next() % 5);
    CHECK(folner_defect(seq, n, g) == folner_defect(seq, n, H.inverse(g)));
  }
}

TEST_CASE("heisenberg balls are almost invariant") {
  const auto H = GroupSpec::heisenberg3();
  FolnerSequence seq(H, WordBallsRule{{}, SizeRule::identity()});
  for (const auto& g : H.standard_generators()) {
    double prev = 2.0;
    for (std::int64_t n : {2, 4, 8, 12}) {
      const double d = folner_defect(seq, n, g).value();
      CHECK(d < prev);
      prev = d;
    }
    CHECK(prev < 0.4);
  }
}

TEST_CASE("temperedness of integer boxes") {
  FolnerSequence Z(GroupSpec::lattice(1), BoxesRule{});
  const auto prof = temperedness_profile(Z, 64);
  REQUIRE(prof.indices.size() == 63);
  for (std::size_t i = 0; i < prof.indices.size(); ++i) {
    const std::int64_t n = prof.indices[i];
    CHECK(prof.ratios[i] == Ratio{2 * n - 2, n});
    CHECK(prof.ratios[i] >= Ratio{1, 1});
  }
  CHECK(prof.max_ratio == Ratio{126, 64});
  CHECK(prof.max_ratio < Ratio{2, 1});
}

TEST_CASE("temperedness of full group and explicit sets") {
  FolnerSequence fin(GroupSpec::finite_abelian({3, 4}), FullGroupRule{});
  const auto prof = temperedness_profile(fin, 10);
  for (const auto& r : prof.ratios) CHECK(r == Ratio{1, 1});

  FolnerSequence ex(GroupSpec::lattice(1), ExplicitRule{{{GroupElement{0}}, {GroupElement{10}}}});
  const auto p2 = temperedness_profile(ex, 2);
  REQUIRE(p2.ratios.size() == 1);
  CHECK(p2.ratios[0] == Ratio{1, 1});
  CHECK_THROWS_AS(ex.set(3), Error);
}

TEST_CASE("tempered subsequence") {
  FolnerSequence Z(GroupSpec::lattice(1), BoxesRule{});
  const auto all = tempered_subsequence(Z, 32, 2.0);
  CHECK(all.size() == 32);
  CHECK(tempered_subsequence(Z, 32, 0.5).empty());
  FolnerSequence fin(GroupSpec::finite_abelian({6}), FullGroupRule{});
  CHECK(tempered_subsequence(fin, 12, 1.0).size() == 12);
  // a tighter constant keeps a sparser subsequence, every index re-checked
  const auto sparse = tempered_subsequence(Z, 32, 1.5);
  REQUIRE(sparse.size() >= 2);
  for (std::size_t i = 1; i < sparse.size(); ++i) {
    std::vector<std::int64_t> prev(sparse.begin(), sparse.begin() + static_cast<std::ptrdiff_t>(i));
    CHECK(ratio_le(tempered_ratio(Z, prev, sparse[i]), 1.5));
  }
}

TEST_CASE("cardinality budget") {
  FolnerSequence Z3(GroupSpec::lattice(3), BoxesRule{}, 1000);
  CHECK(Z3.set(10)->size() == 1000);
  try {
    Z3.set(11);
    FAIL("expected resource error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::resource);
  }
}
