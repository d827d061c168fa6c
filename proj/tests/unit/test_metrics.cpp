#include <cmath>

#include "doctest.h"
#include "error.hpp"
#include "metrics.hpp"
#include "rng.hpp"

using namespace dspec;

namespace {

const double kGolden = 0.6180339887498949;

std::vector<std::uint32_t> identity_perm(std::uint32_t n) {
  std::vector<std::uint32_t> p(n);
  for (std::uint32_t i = 0; i < n; ++i) p[i] = i;
  return p;
}

}  // namespace

TEST_CASE("semimetric of a point with itself is zero") {
  TorusSystem T(GroupSpec::lattice(1), 2, {{kGolden, 0.3}});
  const auto x = T.sample(1, 1)[0];
  for (const auto& w : {Semimetric::base(), Semimetric::base_sum(), Semimetric::observable(Observable::torus_sin()),
                        Semimetric::hamming(Partition::torus_intervals({0.5}))})
    CHECK(eval_semimetric(T, w, x, x) == 0.0);
}

TEST_CASE("two-set partition gives the indicator difference") {
  TorusSystem T(GroupSpec::lattice(1), 1, {{kGolden}});
  const auto alpha = Partition::two_set("A", [](const Point& p) { return std::get<TorusPoint>(p).coords()[0] < 0.3; });
  const auto w = Semimetric::hamming(alpha);
  CHECK(eval_semimetric(T, w, T.point({0.1}), T.point({0.2})) == 0.0);
  CHECK(eval_semimetric(T, w, T.point({0.1}), T.point({0.7})) == 1.0);
  CHECK(eval_semimetric(T, w, T.point({0.9}), T.point({0.7})) == 0.0);
}

TEST_CASE("origin observable on the subshift") {
  SubshiftSystem S(1, 2, SubshiftSystem::Bernoulli{{0.5, 0.5}});
  const auto h = Semimetric::observable(Observable::origin_indicator(S));
  const Point x = S.point(1, GroupElement{0}, {1}, {1});
  const Point y = S.point(2, GroupElement{0}, {1}, {0});
  CHECK(eval_semimetric(S, h, x, y) == 1.0);
}

TEST_CASE("partition must fire exactly once") {
  TorusSystem T(GroupSpec::lattice(1), 1, {{kGolden}});
  Partition overlapping("bad", {[](const Point&) { return true; }, [](const Point&) { return true; }});
  CHECK_THROWS_AS(overlapping.cell(T.point({0.1})), Error);
  Partition gap("gap", {[](const Point& p) { return std::get<TorusPoint>(p).coords()[0] < 0.5; }});
  CHECK_THROWS_AS(gap.cell(T.point({0.7})), Error);
  const auto halves = Partition::torus_intervals({0.5});
  CHECK(halves.label(T.point({0.5})) == 2);
  CHECK(halves.label(T.point({0.0})) == 1);
}

TEST_CASE("rotation mean distance equals the base distance") {
  TorusSystem T(GroupSpec::lattice(1), 2, {{kGolden, 0.4142135623730951}});
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  const auto pts = T.sample(3, 60);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2)
    for (std::int64_t n : {1, 7, 64, 300}) {
      CHECK(mean_semimetric(T, Semimetric::base(), seq, n, pts[i], pts[i + 1]) == T.base_distance(pts[i], pts[i + 1]));
      CHECK(mean_semimetric(T, Semimetric::base(), seq, n, pts[i], pts[i]) == 0.0);
    }
}

TEST_CASE("Hamming mean over four coordinates") {
  SubshiftSystem S(1, 2, SubshiftSystem::Bernoulli{{0.5, 0.5}});
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  const Point x = S.point(1, GroupElement{0}, {4}, {0, 1, 0, 1});
  const Point y = S.point(2, GroupElement{0}, {4}, {0, 1, 1, 1});
  const auto w = Semimetric::hamming(Partition::cylinder(S));
  CHECK(mean_semimetric(S, w, seq, 4, x, y) == 0.25);
  CHECK(alpha_name(S, Partition::cylinder(S), seq, 4, x) == std::vector<std::size_t>{1, 2, 1, 2});
}

TEST_CASE("rotation name follows the orbit") {
  TorusSystem T(GroupSpec::lattice(1), 1, {{kGolden}});
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  // orbit 0, 0.618, 0.236
  const auto halves = Partition::torus_intervals({0.5});
  CHECK(alpha_name(T, halves, seq, 3, T.point({0.0})) == std::vector<std::size_t>{1, 2, 1});
  // independent oracle in plain doubles
  for (double x0 : {0.0, 0.13, 0.77}) {
    const auto name = alpha_name(T, halves, seq, 50, T.point({x0}));
    for (std::size_t k = 0; k < name.size(); ++k) {
      const double y = std::fmod(x0 + static_cast<double>(k) * kGolden, 1.0);
      if (std::abs(y - 0.5) > 1e-9 && y > 1e-9 && y < 1 - 1e-9) CHECK(name[k] == (y < 0.5 ? 1u : 2u));
    }
  }
}

TEST_CASE("identity action name is the cell of x") {
  FiniteSystem F(GroupSpec::lattice(1), {identity_perm(3)}, {1, 1, 1}, FiniteSystem::discrete_metric(3));
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  const auto alpha = Partition::atom_labels({0, 1, 1});
  CHECK(alpha_name(F, alpha, seq, 1, FinitePoint{2}) == std::vector<std::size_t>{2});
}

TEST_CASE("Hamming identity on random subshift pairs") {
  SubshiftSystem S(1, 2, SubshiftSystem::Bernoulli{{0.5, 0.5}});
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  const auto pts = S.sample(11, 400);
  const auto alpha = Partition::cylinder(S);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    CHECK(hamming_identity_check(S, alpha, seq, 1 + static_cast<std::int64_t>(i % 37), pts[i], pts[i + 1]));
    CHECK(hamming_identity_check(S, alpha, seq, 9, pts[i], pts[i]));
  }
}

TEST_CASE("Hamming identity exhaustively on a finite system") {
  std::vector<std::uint32_t> p{1, 2, 3, 4, 0};
  FiniteSystem F(GroupSpec::lattice(1), {p}, {1, 1, 1, 1, 1}, FiniteSystem::cyclic_metric(5));
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  const auto alpha = Partition::atom_labels({0, 0, 1, 0, 1});
  for (std::uint32_t a = 0; a < 5; ++a)
    for (std::uint32_t b = 0; b < 5; ++b)
      for (std::int64_t n = 1; n <= 12; ++n) CHECK(hamming_identity_check(F, alpha, seq, n, FinitePoint{a}, FinitePoint{b}));
}

TEST_CASE("mean semimetric axioms and bounds") {
  SubshiftSystem S(1, 2, SubshiftSystem::Bernoulli{{0.3, 0.7}}, 8);
  FolnerSequence seq(GroupSpec::lattice(1), BoxesRule{});
  const auto pts = S.sample(21, 300);
  const std::vector<Semimetric> ws{Semimetric::base(), Semimetric::hamming(Partition::cylinder(S)),
                                   Semimetric::observable(Observable::origin_indicator(S))};
  for (const auto& w : ws) {
    const double bound = w.kind() == Semimetric::Kind::base ? S.diameter() : 1.0;
    for (std::size_t i = 0; i + 2 < pts.size(); i += 3) {
      const double ab = mean_semimetric(S, w, seq, 10, pts[i], pts[i + 1]);
      const double ba = mean_semimetric(S, w, seq, 10, pts[i + 1], pts[i]);
      const double bc = mean_semimetric(S, w, seq, 10, pts[i + 1], pts[i + 2]);
      const double ac = mean_semimetric(S, w, seq, 10, pts[i], pts[i + 2]);
      CHECK(ab == ba);
      CHECK(ac <= ab + bc + 1e-12);
      CHECK((ab >= 0.0 && ab <= bound + 1e-12));
    }
  }
}

TEST_CASE("torus character observable") {
  TorusSystem T(GroupSpec::lattice(1), 2, {{kGolden, 0.1}});
  const auto chi = Observable::torus_character({1, -2});
  const auto v = chi(T.point({0.25, 0.125}));
  // angle 2pi(0.25 - 0.25) = 0
  CHECK(v.real() == doctest::Approx(1.0));
  CHECK(std::abs(v.imag()) < 1e-12);
  CHECK(std::abs(chi(T.point({0.1, 0.7}))) == doctest::Approx(1.0));
  CHECK(observable_bound(T, chi, 1, 100) == doctest::Approx(1.1));
}
