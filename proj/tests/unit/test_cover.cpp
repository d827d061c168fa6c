#include <bit>

#include "cover_solver.hpp"
#include "doctest.h"
#include "error.hpp"
#include "rng.hpp"

using namespace dspec;

namespace {

// exhaustive oracle over all subsets of sets
std::size_t brute_force(const CoverInstance& inst, std::int64_t umax) {
  std::size_t best = SIZE_MAX;
  const std::size_t S = inst.set_count();
  for (std::uint32_t mask = 1; mask < (1u << S); ++mask) {
    const auto k = static_cast<std::size_t>(std::popcount(mask));
    if (k >= best) continue;
    std::vector<std::uint32_t> sel;
    for (std::uint32_t s = 0; s < S; ++s)
      if (mask >> s & 1) sel.push_back(s);
    if (uncovered_weight(inst, sel) <= umax) best = k;
  }
  return best;
}

CoverInstance random_instance(KeyedStream& rs, std::size_t E, std::size_t S) {
  CoverInstance inst;
  for (std::size_t e = 0; e < E; ++e) inst.weight.push_back(static_cast<std::int64_t>(rs.next() % 5));
  for (std::size_t s = 0; s < S; ++s) {
    std::vector<std::uint32_t> items;
    for (std::uint32_t e = 0; e < E; ++e)
      if (rs.next() % 4 == 0 || e % S == s) items.push_back(e);
    inst.add_set(items);
  }
  return inst;
}

}  // namespace

TEST_CASE("greedy picks the heaviest set, lowest index on ties") {
  CoverInstance inst;
  inst.weight = {1, 1, 1, 1};
  inst.add_set(std::vector<std::uint32_t>{0, 1});
  inst.add_set(std::vector<std::uint32_t>{2, 3});
  inst.add_set(std::vector<std::uint32_t>{1, 2});
  const auto sol = greedy_cover(inst, 0);
  CHECK(sol.sets == std::vector<std::uint32_t>{0, 1});
  CHECK(sol.uncovered == 0);
  // a vacuous target still returns one set
  CHECK(greedy_cover(inst, 10).sets.size() == 1);
}

TEST_CASE("exact cover agrees with exhaustive search") {
  KeyedStream rs(99, 1);
  for (int t = 0; t < 300; ++t) {
    const std::size_t E = 4 + rs.next() % 9, S = 3 + rs.next() % 10;
    const auto inst = random_instance(rs, E, S);
    const std::int64_t total = inst.total();
    const std::int64_t umax = static_cast<std::int64_t>(rs.next() % static_cast<std::uint64_t>(total + 1));
    const std::size_t oracle = std::max<std::size_t>(brute_force(inst, umax), 1);
    ExactCoverOptions opt;
    opt.local_search_moves = (t % 2) ? 0 : 2000;
    const auto res = exact_cover(inst, umax, opt);
    REQUIRE(res.value == oracle);
    CHECK(res.volume_bound <= res.value);
    CHECK(res.greedy_value >= res.value);
    CHECK(res.witness.sets.size() == res.value);
    CHECK(uncovered_weight(inst, res.witness.sets) <= umax);
  }
}

TEST_CASE("exact cover budget") {
  // 3 x 3 grid of disjoint pairs plus decoys: tiny budget cannot close the gap
  KeyedStream rs(5, 5);
  const auto inst = random_instance(rs, 40, 60);
  ExactCoverOptions opt;
  opt.node_budget = 1;
  opt.local_search_moves = 0;
  try {
    const auto r = exact_cover(inst, 0, opt);
    CHECK(r.value == r.volume_bound);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::resource);
  }
}
