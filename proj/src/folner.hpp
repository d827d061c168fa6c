#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <variant>
#include <vector>

#include "exact.hpp"
#include "group.hpp"

namespace dspec {

/// n -> integer parameter (box side or ball radius).
struct SizeRule {
  enum class Kind { linear, power_of_two, table };
  Kind kind = Kind::linear;
  std::int64_t scale = 1;
  std::int64_t offset = 0;
  std::vector<std::int64_t> table;  // table[n-1]

  std::int64_t operator()(std::int64_t n) const;

  static SizeRule identity() { return {}; }
};

/// A finite subset of G in lexicographic order. The order is part of the
/// public contract: names and orbit tables are indexed by it.
class FolnerSet {
 public:
  FolnerSet() = default;
  explicit FolnerSet(std::vector<GroupElement> elements);  // sorts and dedups

  std::size_t size() const { return elements_.size(); }
  const GroupElement& operator[](std::size_t i) const { return elements_[i]; }
  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }
  const std::vector<GroupElement>& elements() const { return elements_; }
  bool contains(const GroupElement& g) const;

 private:
  std::vector<GroupElement> elements_;
};

struct BoxesRule {
  SizeRule side;
};
struct WordBallsRule {
  std::vector<GroupElement> generators;  // empty: standard generators
  SizeRule radius;
};
struct FullGroupRule {};
struct ExplicitRule {
  std::vector<std::vector<GroupElement>> sets;  // sets[n-1]
};
using FolnerRule = std::variant<BoxesRule, WordBallsRule, FullGroupRule, ExplicitRule>;

/// Indexed family F_1, F_2, ... with a generator rule and an append-only
/// cache. Safe to query from several threads.
class FolnerSequence {
 public:
  static constexpr std::size_t kDefaultCardinalityBudget = 1'000'000;

  FolnerSequence(GroupSpec group, FolnerRule rule,
                 std::size_t cardinality_budget = kDefaultCardinalityBudget);

  /// Boxes [0,n)^d on lattices, word balls of radius n on the Heisenberg
  /// group, the whole group on finite groups.
  static FolnerSequence default_for(const GroupSpec& group);

  const GroupSpec& group() const { return group_; }
  const FolnerRule& rule() const { return rule_; }
  std::size_t cardinality_budget() const { return budget_; }

  /// F_n for n >= 1.
  std::shared_ptr<const FolnerSet> set(std::int64_t n) const;

 private:
  FolnerSet build(std::int64_t n) const;

  GroupSpec group_;
  FolnerRule rule_;
  std::size_t budget_;
  mutable std::mutex mutex_;
  mutable std::map<std::int64_t, std::shared_ptr<const FolnerSet>> cache_;
};

inline std::shared_ptr<const FolnerSet> folner_set(const FolnerSequence& seq, std::int64_t n) {
  return seq.set(n);
}

/// Breadth-first word ball of the given radius, in (word length, lex) order.
/// An empty generator list means the standard symmetric generators.
std::vector<GroupElement> word_ball(const GroupSpec& group, const std::vector<GroupElement>& generators,
                                    std::int64_t radius, std::size_t budget);

/// |g F_n  symmetric-difference  F_n| / |F_n|.
Ratio folner_defect(const FolnerSequence& seq, std::int64_t n, const GroupElement& g);

struct TemperednessProfile {
  std::vector<std::int64_t> indices;  // n = 2..n_max
  std::vector<Ratio> ratios;          // |U_{k<n} F_k^-1 F_n| / |F_n|
  Ratio max_ratio;
};

inline constexpr std::size_t kDefaultProductBudget = 100'000'000;

TemperednessProfile temperedness_profile(const FolnerSequence& seq, std::int64_t n_max,
                                         std::size_t product_budget = kDefaultProductBudget);

/// Greedy scan over 1..n_max keeping n when |U_{k kept} F_k^-1 F_n| <= C |F_n|.
/// A single surviving index certifies nothing, so results with fewer than two
/// indices are reported as empty.
std::vector<std::int64_t> tempered_subsequence(const FolnerSequence& seq, std::int64_t n_max, double C,
                                               std::size_t product_budget = kDefaultProductBudget);

/// Exact ratio |U_{k in previous} F_k^-1 F_n| / |F_n|.
Ratio tempered_ratio(const FolnerSequence& seq, const std::vector<std::int64_t>& previous, std::int64_t n,
                     std::size_t product_budget = kDefaultProductBudget);

}  // namespace dspec
