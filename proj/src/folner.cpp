#include "folner.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

#include "error.hpp"

namespace dspec {

std::int64_t SizeRule::operator()(std::int64_t n) const {
  require(n >= 1, ErrorKind::input, "Følner index must be >= 1");
  switch (kind) {
    case Kind::linear: return scale * n + offset;
    case Kind::power_of_two:
      require(n < 62, ErrorKind::input, "power_of_two size rule overflows");
      return std::int64_t{1} << n;
    case Kind::table:
      require(static_cast<std::size_t>(n) <= table.size(), ErrorKind::input,
              "size table has no entry for n=" + std::to_string(n));
      return table[static_cast<std::size_t>(n - 1)];
  }
  return 0;
}

FolnerSet::FolnerSet(std::vector<GroupElement> elements) : elements_(std::move(elements)) {
  std::sort(elements_.begin(), elements_.end());
  elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
}

bool FolnerSet::contains(const GroupElement& g) const {
  return std::binary_search(elements_.begin(), elements_.end(), g);
}

FolnerSequence::FolnerSequence(GroupSpec group, FolnerRule rule, std::size_t cardinality_budget)
    : group_(std::move(group)), rule_(std::move(rule)), budget_(cardinality_budget) {
  if (auto* balls = std::get_if<WordBallsRule>(&rule_)) {
    if (balls->generators.empty()) balls->generators = group_.standard_generators();
    for (auto& g : balls->generators) group_.validate(g);
  }
  if (auto* expl = std::get_if<ExplicitRule>(&rule_)) {
    for (auto& s : expl->sets) {
      require(!s.empty(), ErrorKind::input, "explicit Følner sets must be nonempty");
      for (auto& g : s) group_.validate(g);
    }
  }
  if (std::holds_alternative<FullGroupRule>(rule_)) {
    require(group_.is_finite(), ErrorKind::unsupported,
            "full_group rule requires a finite group, got " + group_.describe());
  }
  if (std::holds_alternative<BoxesRule>(rule_)) {
    require(group_.kind() != GroupKind::finite_abelian, ErrorKind::unsupported,
            "boxes rule is defined for lattices and the Heisenberg group");
  }
}

FolnerSequence FolnerSequence::default_for(const GroupSpec& group) {
  switch (group.kind()) {
    case GroupKind::lattice: return FolnerSequence(group, BoxesRule{SizeRule::identity()});
    case GroupKind::heisenberg3: return FolnerSequence(group, WordBallsRule{{}, SizeRule::identity()});
    case GroupKind::finite_abelian: return FolnerSequence(group, FullGroupRule{});
  }
  fail(ErrorKind::input, "unknown group kind");
}

std::shared_ptr<const FolnerSet> FolnerSequence::set(std::int64_t n) const {
  require(n >= 1, ErrorKind::input, "Følner index must be >= 1, got " + std::to_string(n));
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(n); it != cache_.end()) return it->second;
  }
  auto built = std::make_shared<const FolnerSet>(build(n));
  std::lock_guard lock(mutex_);
  auto [it, inserted] = cache_.emplace(n, std::move(built));
  return it->second;
}

std::vector<GroupElement> word_ball(const GroupSpec& group, const std::vector<GroupElement>& generators,
                                    std::int64_t radius, std::size_t budget) {
  require(radius >= 0, ErrorKind::input, "word ball radius must be >= 0");
  const auto& gens = generators.empty() ? group.standard_generators() : generators;
  std::vector<GroupElement> order{group.identity()};
  std::unordered_set<GroupElement, GroupElementHash> seen{group.identity()};
  std::size_t frontier_begin = 0;
  for (std::int64_t r = 0; r < radius; ++r) {
    std::size_t frontier_end = order.size();
    std::vector<GroupElement> shell;
    for (std::size_t i = frontier_begin; i < frontier_end; ++i) {
      for (const auto& s : gens) {
        auto next = group.multiply(order[i], s);
        if (seen.insert(next).second) {
          shell.push_back(next);
          require(seen.size() <= budget, ErrorKind::resource,
                  "word ball exceeds cardinality budget " + std::to_string(budget));
        }
      }
    }
    if (shell.empty()) break;
    std::sort(shell.begin(), shell.end());
    order.insert(order.end(), shell.begin(), shell.end());
    frontier_begin = frontier_end;
  }
  return order;
}

FolnerSet FolnerSequence::build(std::int64_t n) const {
  return std::visit(
      [&](const auto& rule) -> FolnerSet {
        using R = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<R, BoxesRule>) {
          std::int64_t side = rule.side(n);
          require(side >= 1, ErrorKind::input, "box side must be >= 1 at n=" + std::to_string(n));
          // Heisenberg boxes: [0,L) x [0,L) x [0,L^2)
          std::vector<std::int64_t> extent(group_.rank(), side);
          if (group_.kind() == GroupKind::heisenberg3) extent[2] = side * side;
          long double volume = 1;
          for (auto e : extent) volume *= static_cast<long double>(e);
          require(volume <= static_cast<long double>(budget_), ErrorKind::resource,
                  "box exceeds cardinality budget " + std::to_string(budget_));
          std::vector<GroupElement> out;
          out.reserve(static_cast<std::size_t>(volume));
          GroupElement g = group_.identity();
          while (true) {
            out.push_back(g);
            std::size_t i = group_.rank();
            bool done = true;
            while (i > 0) {
              --i;
              if (++g[i] < extent[i]) {
                done = false;
                break;
              }
              g[i] = 0;
            }
            if (done) break;
          }
          return FolnerSet(std::move(out));
        } else if constexpr (std::is_same_v<R, WordBallsRule>) {
          return FolnerSet(word_ball(group_, rule.generators, rule.radius(n), budget_));
        } else if constexpr (std::is_same_v<R, FullGroupRule>) {
          return FolnerSet(group_.elements());
        } else {
          require(static_cast<std::size_t>(n) <= rule.sets.size(), ErrorKind::input,
                  "explicit Følner sequence has no set for n=" + std::to_string(n));
          return FolnerSet(rule.sets[static_cast<std::size_t>(n - 1)]);
        }
      },
      rule_);
}

Ratio folner_defect(const FolnerSequence& seq, std::int64_t n, const GroupElement& g) {
  const auto& group = seq.group();
  group.validate(g);
  auto set = seq.set(n);
  std::vector<GroupElement> shifted;
  shifted.reserve(set->size());
  for (const auto& f : *set) shifted.push_back(group.multiply(g, f));
  std::sort(shifted.begin(), shifted.end());
  std::vector<GroupElement> diff;
  std::set_symmetric_difference(shifted.begin(), shifted.end(), set->begin(), set->end(),
                                std::back_inserter(diff));
  return Ratio{static_cast<std::int64_t>(diff.size()), static_cast<std::int64_t>(set->size())};
}

namespace {

std::size_t product_size(const GroupSpec& group, const std::vector<GroupElement>& left,
                         const FolnerSet& right, std::size_t product_budget) {
  require(static_cast<long double>(left.size()) * right.size() <= product_budget, ErrorKind::resource,
          "set product exceeds budget " + std::to_string(product_budget));
  std::unordered_set<GroupElement, GroupElementHash> product;
  product.reserve(left.size() + right.size());
  for (const auto& a : left)
    for (const auto& b : right) product.insert(group.multiply(a, b));
  return product.size();
}

void add_inverses(const GroupSpec& group, const FolnerSet& set,
                  std::unordered_set<GroupElement, GroupElementHash>& into) {
  for (const auto& f : set) into.insert(group.inverse(f));
}

std::vector<GroupElement> sorted(const std::unordered_set<GroupElement, GroupElementHash>& s) {
  std::vector<GroupElement> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

Ratio tempered_ratio(const FolnerSequence& seq, const std::vector<std::int64_t>& previous, std::int64_t n,
                     std::size_t product_budget) {
  const auto& group = seq.group();
  std::unordered_set<GroupElement, GroupElementHash> inverses;
  for (auto k : previous) add_inverses(group, *seq.set(k), inverses);
  auto fn = seq.set(n);
  auto count = product_size(group, sorted(inverses), *fn, product_budget);
  return Ratio{static_cast<std::int64_t>(count), static_cast<std::int64_t>(fn->size())};
}

TemperednessProfile temperedness_profile(const FolnerSequence& seq, std::int64_t n_max,
                                         std::size_t product_budget) {
  require(n_max >= 2, ErrorKind::input, "temperedness profile needs n_max >= 2");
  const auto& group = seq.group();
  TemperednessProfile out;
  std::unordered_set<GroupElement, GroupElementHash> inverses;
  for (std::int64_t n = 2; n <= n_max; ++n) {
    add_inverses(group, *seq.set(n - 1), inverses);
    auto fn = seq.set(n);
    auto count = product_size(group, sorted(inverses), *fn, product_budget);
    Ratio r{static_cast<std::int64_t>(count), static_cast<std::int64_t>(fn->size())};
    out.indices.push_back(n);
    out.ratios.push_back(r);
    if (out.ratios.size() == 1 || r > out.max_ratio) out.max_ratio = r;
  }
  return out;
}

std::vector<std::int64_t> tempered_subsequence(const FolnerSequence& seq, std::int64_t n_max, double C,
                                               std::size_t product_budget) {
  require(C > 0, ErrorKind::input, "tempered constant must be > 0");
  const auto& group = seq.group();
  std::vector<std::int64_t> kept;
  std::unordered_set<GroupElement, GroupElementHash> inverses;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    auto fn = seq.set(n);
    Ratio r{0, static_cast<std::int64_t>(fn->size())};
    if (!kept.empty()) {
      r.num = static_cast<std::int64_t>(product_size(group, sorted(inverses), *fn, product_budget));
    }
    if (ratio_le(r, C)) {
      kept.push_back(n);
      add_inverses(group, *fn, inverses);
    }
  }
  if (kept.size() < 2) return {};
  // re-verify every kept index against its kept predecessors
  for (std::size_t j = 1; j < kept.size(); ++j) {
    std::vector<std::int64_t> previous(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(j));
    auto r = tempered_ratio(seq, previous, kept[j], product_budget);
    require(ratio_le(r, C), ErrorKind::setup, "tempered subsequence failed re-verification");
  }
  return kept;
}

}  // namespace dspec
