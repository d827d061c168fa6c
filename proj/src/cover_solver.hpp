#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dspec {

/// Weighted partial set cover: pick the fewest sets whose union has weight
/// >= total - max_uncovered. Weights are exact integers.
struct CoverInstance {
  std::vector<std::int64_t> weight;      // per element
  std::vector<std::size_t> set_offset{0};  // CSR over candidate sets
  std::vector<std::uint32_t> set_items;

  std::size_t element_count() const { return weight.size(); }
  std::size_t set_count() const { return set_offset.size() - 1; }
  std::span<const std::uint32_t> items(std::size_t s) const {
    return {set_items.data() + set_offset[s], set_offset[s + 1] - set_offset[s]};
  }
  std::int64_t total() const;
  void add_set(std::span<const std::uint32_t> items);
  /// Throws input error on out-of-range items or negative weights.
  void validate() const;
};

struct CoverSolution {
  std::vector<std::uint32_t> sets;  // in selection order
  std::int64_t uncovered = 0;
};

/// Lazy greedy: repeatedly take the set with the largest uncovered weight,
/// ties to the lowest index, until uncovered <= max_uncovered. At least one
/// set is always chosen.
CoverSolution greedy_cover(const CoverInstance& inst, std::int64_t max_uncovered);

struct ExactCoverOptions {
  std::uint64_t node_budget = 10'000'000;
  std::uint64_t local_search_moves = 20'000'000;  // capped at 64 per incidence entry
  std::uint64_t seed = 0x5eed;
};

struct ExactCoverResult {
  std::size_t value = 0;        // optimum
  std::size_t volume_bound = 0;  // lower bound from set weights alone
  std::size_t greedy_value = 0;
  std::uint64_t nodes = 0;
  CoverSolution witness;
};

/// Smallest number of sets reaching the coverage target: volume lower bound,
/// greedy upper bound, seeded local search between them, then branch and
/// bound. Throws resource error when the node budget runs out with a gap.
ExactCoverResult exact_cover(const CoverInstance& inst, std::int64_t max_uncovered, const ExactCoverOptions& opt = {});

/// Uncovered weight of a given selection (independent recount).
std::int64_t uncovered_weight(const CoverInstance& inst, std::span<const std::uint32_t> sets);

}  // namespace dspec
