#include "cover_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

#include "error.hpp"
#include "rng.hpp"

namespace dspec {

std::int64_t CoverInstance::total() const {
  std::int64_t t = 0;
  for (auto w : weight) t += w;
  return t;
}

void CoverInstance::add_set(std::span<const std::uint32_t> its) {
  set_items.insert(set_items.end(), its.begin(), its.end());
  set_offset.push_back(set_items.size());
}

void CoverInstance::validate() const {
  std::int64_t t = 0;
  for (auto w : weight) {
    require(w >= 0, ErrorKind::input, "cover weights must be nonnegative");
    require(t <= INT64_MAX / 2 - w, ErrorKind::input, "cover weights overflow");
    t += w;
  }
  for (auto e : set_items) require(e < weight.size(), ErrorKind::input, "cover set item out of range");
  require(set_offset.front() == 0 && set_offset.back() == set_items.size(), ErrorKind::input, "bad cover CSR");
}

std::int64_t uncovered_weight(const CoverInstance& inst, std::span<const std::uint32_t> sets) {
  std::vector<char> covered(inst.element_count(), 0);
  for (auto s : sets)
    for (auto e : inst.items(s)) covered[e] = 1;
  std::int64_t u = 0;
  for (std::size_t e = 0; e < covered.size(); ++e)
    if (!covered[e]) u += inst.weight[e];
  return u;
}

CoverSolution greedy_cover(const CoverInstance& inst, std::int64_t max_uncovered) {
  require(inst.set_count() >= 1, ErrorKind::input, "cover instance has no sets");
  std::vector<char> covered(inst.element_count(), 0);
  CoverSolution sol;
  sol.uncovered = inst.total();
  const auto gain = [&](std::size_t s) {
    std::int64_t g = 0;
    for (auto e : inst.items(s))
      if (!covered[e]) g += inst.weight[e];
    return g;
  };
  using Entry = std::pair<std::int64_t, std::int64_t>;  // (gain, -index): max-heap pops lowest index on ties
  std::priority_queue<Entry> heap;
  for (std::size_t s = 0; s < inst.set_count(); ++s) heap.emplace(gain(s), -static_cast<std::int64_t>(s));
  while (!heap.empty() && (sol.uncovered > max_uncovered || sol.sets.empty())) {
    const auto [stale, neg] = heap.top();
    heap.pop();
    const auto s = static_cast<std::size_t>(-neg);
    const std::int64_t g = gain(s);
    if (g != stale) {
      heap.emplace(g, neg);
      continue;
    }
    if (g == 0 && !sol.sets.empty()) break;
    sol.sets.push_back(static_cast<std::uint32_t>(s));
    for (auto e : inst.items(s)) covered[e] = 1;
    sol.uncovered -= g;
  }
  require(sol.uncovered <= max_uncovered, ErrorKind::input, "coverage target unreachable with the given sets");
  return sol;
}

namespace {

class Exact {
 public:
  Exact(const CoverInstance& inst, std::int64_t max_uncovered, const ExactCoverOptions& opt)
      : inst_(inst), umax_(max_uncovered), opt_(opt), E_(inst.element_count()), S_(inst.set_count()) {
    std::vector<std::size_t> cnt(E_ + 1, 0);
    for (auto e : inst.set_items) ++cnt[e + 1];
    for (std::size_t e = 0; e < E_; ++e) cnt[e + 1] += cnt[e];
    elem_off_ = cnt;
    elem_sets_.resize(inst.set_items.size());
    for (std::size_t s = 0; s < S_; ++s)
      for (auto e : inst.items(s)) elem_sets_[cnt[e]++] = static_cast<std::uint32_t>(s);
    total_ = inst.total();
    need_ = total_ - umax_;
  }

  std::span<const std::uint32_t> sets_of(std::size_t e) const {
    return {elem_sets_.data() + elem_off_[e], elem_off_[e + 1] - elem_off_[e]};
  }

  std::size_t volume_bound() const {
    if (need_ <= 0) return 1;
    std::vector<std::int64_t> w(S_);
    for (std::size_t s = 0; s < S_; ++s)
      for (auto e : inst_.items(s)) w[s] += inst_.weight[e];
    std::sort(w.begin(), w.end(), std::greater<>());
    std::int64_t acc = 0;
    for (std::size_t m = 0; m < S_; ++m) {
      acc += w[m];
      if (acc >= need_) return m + 1;
    }
    return S_ + 1;
  }

  // Simulated annealing on exactly k sets, restarted from the greedy start
  // with fresh streams; minimizes the uncovered weight.
  bool local_search(std::size_t k, const std::vector<std::uint32_t>& start, std::vector<std::uint32_t>& out) {
    const std::uint64_t budget =
        std::min<std::uint64_t>(opt_.local_search_moves, 64 * static_cast<std::uint64_t>(inst_.set_items.size()));
    if (k == 0 || budget == 0) return false;
    const std::uint64_t run = std::max<std::uint64_t>(100'000, budget / 4);
    for (std::uint64_t used = 0, r = 0; used < budget; used += run, ++r)
      if (anneal(k, start, std::min(run, budget - used), hash_combine(k, r), out)) return true;
    return false;
  }

  bool anneal(std::size_t k, const std::vector<std::uint32_t>& start, std::uint64_t moves, std::uint64_t stream,
              std::vector<std::uint32_t>& out) {
    std::vector<std::uint32_t> cnt(E_, 0), owner(E_, 0);
    std::vector<std::int64_t> loss(S_, 0);
    std::vector<char> chosen(S_, 0);
    std::vector<std::uint32_t> sel;
    std::vector<std::uint32_t> open;  // uncovered positive-weight elements
    std::vector<std::uint32_t> open_pos(E_, UINT32_MAX);
    std::int64_t U = total_;
    const auto open_add = [&](std::uint32_t e) {
      if (inst_.weight[e] == 0) return;
      open_pos[e] = static_cast<std::uint32_t>(open.size());
      open.push_back(e);
    };
    const auto open_remove = [&](std::uint32_t e) {
      if (open_pos[e] == UINT32_MAX) return;
      const auto last = open.back();
      open[open_pos[e]] = last;
      open_pos[last] = open_pos[e];
      open.pop_back();
      open_pos[e] = UINT32_MAX;
    };
    for (std::uint32_t e = 0; e < E_; ++e) open_add(e);
    // owner[e] is the xor of the chosen sets covering e, hence the unique
    // one when cnt[e] == 1; loss[s] is the weight only s covers
    const auto add = [&](std::uint32_t s) {
      chosen[s] = 1;
      loss[s] = 0;
      for (auto e : inst_.items(s)) {
        const auto w = inst_.weight[e];
        if (cnt[e] == 0) {
          U -= w;
          loss[s] += w;
          open_remove(e);
        } else if (cnt[e] == 1) {
          loss[owner[e]] -= w;
        }
        ++cnt[e];
        owner[e] ^= s;
      }
    };
    const auto remove = [&](std::uint32_t s) {
      chosen[s] = 0;
      for (auto e : inst_.items(s)) {
        const auto w = inst_.weight[e];
        --cnt[e];
        owner[e] ^= s;
        if (cnt[e] == 0) {
          U += w;
          open_add(e);
        } else if (cnt[e] == 1) {
          loss[owner[e]] += w;
        }
      }
    };
    for (auto s : start) {
      if (sel.size() == k) break;
      if (!chosen[s]) {
        add(s);
        sel.push_back(s);
      }
    }
    KeyedStream rs(opt_.seed, stream);
    for (std::uint32_t s = 0; sel.size() < k && s < S_; ++s)
      if (!chosen[s]) {
        add(s);
        sel.push_back(s);
      }
    if (sel.size() < k) return false;

    const double mean_w = static_cast<double>(total_) / static_cast<double>(std::max<std::size_t>(E_, 1));
    const double t0 = 2.0 * mean_w, t1 = 0.02 * mean_w;
    std::int64_t best = U;
    std::vector<std::uint32_t> best_sel = sel;
    for (std::uint64_t it = 0; it < moves && best > umax_; ++it) {
      if (open.empty()) break;
      const double temp = t0 * std::pow(t1 / t0, static_cast<double>(it) / static_cast<double>(moves));
      const std::uint32_t e = open[rs.next() % open.size()];
      const auto cand = sets_of(e);
      const std::uint32_t t = cand[rs.next() % cand.size()];
      const std::int64_t before = U;
      add(t);
      // drop the cheapest other set (random among ties), sometimes any set
      std::size_t pick = 0;
      std::int64_t lo = INT64_MAX;
      std::uint64_t ties = 0;
      for (std::size_t i = 0; i < sel.size(); ++i) {
        const auto s = sel[i];
        if (loss[s] < lo) {
          lo = loss[s];
          pick = i;
          ties = 1;
        } else if (loss[s] == lo && rs.next() % ++ties == 0) {
          pick = i;
        }
      }
      if (rs.next() % 16 == 0) pick = rs.next() % sel.size();
      const std::uint32_t s = sel[pick];
      remove(s);
      const std::int64_t delta = U - before;
      if (delta <= 0 || rs.uniform() < std::exp(-static_cast<double>(delta) / temp)) {
        sel[pick] = t;
        if (U < best) {
          best = U;
          best_sel = sel;
        }
      } else {
        add(s);
        remove(t);
      }
    }
    if (best > umax_) return false;
    out = best_sel;
    return true;
  }

  // Branch and bound: is there a selection of at most k sets reaching the target?
  bool search(std::size_t k, std::vector<std::uint32_t>& out) {
    k_ = k;
    cnt_.assign(E_, 0);
    abandoned_.assign(E_, 0);
    allowed_.assign(S_, 1);
    allowed_cnt_.assign(E_, 0);
    gain_.assign(S_, 0);
    for (std::size_t s = 0; s < S_; ++s)
      for (auto e : inst_.items(s)) {
        gain_[s] += inst_.weight[e];
        ++allowed_cnt_[e];
      }
    std::int64_t gmax = 0;
    for (auto g : gain_) gmax = std::max(gmax, g);
    bucketed_ = gmax <= 1 << 16;
    if (bucketed_) {
      bucket_.assign(static_cast<std::size_t>(gmax) + 1, 0);
      for (auto g : gain_) ++bucket_[static_cast<std::size_t>(g)];
      top_ = static_cast<std::size_t>(gmax);
    }
    covered_ = 0;
    abandoned_w_ = 0;
    chosen_.clear();
    return dfs(out);
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  void set_gain(std::uint32_t s, std::int64_t g) {
    if (bucketed_ && allowed_[s]) {
      --bucket_[static_cast<std::size_t>(gain_[s])];
      ++bucket_[static_cast<std::size_t>(g)];
      top_ = std::max(top_, static_cast<std::size_t>(g));
    }
    gain_[s] = g;
  }
  void disallow(std::uint32_t s) {
    if (bucketed_) --bucket_[static_cast<std::size_t>(gain_[s])];
    allowed_[s] = 0;
    for (auto e : inst_.items(s)) --allowed_cnt_[e];
  }
  void allow(std::uint32_t s) {
    allowed_[s] = 1;
    if (bucketed_) {
      ++bucket_[static_cast<std::size_t>(gain_[s])];
      top_ = std::max(top_, static_cast<std::size_t>(gain_[s]));
    }
    for (auto e : inst_.items(s)) ++allowed_cnt_[e];
  }
  // element leaves / re-enters the live (uncovered, not abandoned) pool
  void retire(std::uint32_t e) {
    for (auto t : sets_of(e)) set_gain(t, gain_[t] - inst_.weight[e]);
  }
  void revive(std::uint32_t e) {
    for (auto t : sets_of(e)) set_gain(t, gain_[t] + inst_.weight[e]);
  }
  void choose(std::uint32_t s) {
    disallow(s);
    chosen_.push_back(s);
    for (auto e : inst_.items(s))
      if (cnt_[e]++ == 0 && !abandoned_[e]) {
        covered_ += inst_.weight[e];
        retire(e);
      }
  }
  void unchoose(std::uint32_t s) {
    for (auto e : inst_.items(s))
      if (--cnt_[e] == 0 && !abandoned_[e]) {
        covered_ -= inst_.weight[e];
        revive(e);
      }
    chosen_.pop_back();
    allow(s);
  }

  std::int64_t top_sum(std::size_t r) {
    std::int64_t s = 0;
    if (bucketed_) {
      while (top_ > 0 && bucket_[top_] == 0) --top_;
      for (std::size_t g = top_; g > 0 && r > 0; --g) {
        const std::size_t take = std::min<std::size_t>(r, static_cast<std::size_t>(bucket_[g]));
        s += static_cast<std::int64_t>(take) * static_cast<std::int64_t>(g);
        r -= take;
      }
      return s;
    }
    scratch_.clear();
    for (std::size_t t = 0; t < S_; ++t)
      if (allowed_[t] && gain_[t] > 0) scratch_.push_back(gain_[t]);
    if (scratch_.size() > r) {
      std::nth_element(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(r), scratch_.end(),
                       std::greater<>());
      scratch_.resize(r);
    }
    for (auto g : scratch_) s += g;
    return s;
  }

  bool dfs(std::vector<std::uint32_t>& out) {
    if (++nodes_ > opt_.node_budget) throw Budget{};
    if (covered_ >= need_ && !chosen_.empty()) {
      out = chosen_;
      return true;
    }
    if (chosen_.size() >= k_) return false;
    if (covered_ >= need_) {
      // target met with nothing chosen; any single set completes it
      for (std::uint32_t s = 0; s < S_; ++s)
        if (allowed_[s]) {
          out = {s};
          return true;
        }
      return false;
    }
    if (covered_ + top_sum(k_ - chosen_.size()) < need_) return false;
    // branch on the live element with the fewest remaining options
    std::uint32_t e = UINT32_MAX;
    for (std::uint32_t x = 0; x < E_; ++x)
      if (cnt_[x] == 0 && !abandoned_[x] && inst_.weight[x] > 0 &&
          (e == UINT32_MAX || allowed_cnt_[x] < allowed_cnt_[e]))
        e = x;
    if (e == UINT32_MAX) return false;
    std::vector<std::uint32_t> options;
    for (auto t : sets_of(e))
      if (allowed_[t]) options.push_back(t);
    std::sort(options.begin(), options.end(),
              [&](std::uint32_t a, std::uint32_t b) { return gain_[a] != gain_[b] ? gain_[a] > gain_[b] : a < b; });
    std::vector<std::uint32_t> banned;
    bool found = false;
    for (auto t : options) {
      choose(t);
      found = dfs(out);
      unchoose(t);
      if (found) break;
      disallow(t);
      banned.push_back(t);
    }
    if (!found && abandoned_w_ + inst_.weight[e] <= umax_) {
      abandoned_[e] = 1;
      abandoned_w_ += inst_.weight[e];
      retire(e);
      found = dfs(out);
      revive(e);
      abandoned_w_ -= inst_.weight[e];
      abandoned_[e] = 0;
    }
    for (auto it = banned.rbegin(); it != banned.rend(); ++it) allow(*it);
    return found;
  }

 public:
  struct Budget {};

 private:
  const CoverInstance& inst_;
  std::int64_t umax_;
  ExactCoverOptions opt_;
  std::size_t E_, S_;
  std::vector<std::size_t> elem_off_;
  std::vector<std::uint32_t> elem_sets_;
  std::int64_t total_ = 0, need_ = 0;

  std::size_t k_ = 0;
  std::uint64_t nodes_ = 0;
  std::vector<std::uint32_t> cnt_;
  std::vector<char> abandoned_, allowed_;
  std::vector<std::uint32_t> allowed_cnt_;
  std::vector<std::int64_t> gain_;
  bool bucketed_ = false;
  std::vector<std::int64_t> bucket_;
  std::size_t top_ = 0;
  std::int64_t covered_ = 0, abandoned_w_ = 0;
  std::vector<std::uint32_t> chosen_;
  std::vector<std::int64_t> scratch_;
};

}  // namespace

ExactCoverResult exact_cover(const CoverInstance& inst, std::int64_t max_uncovered, const ExactCoverOptions& opt) {
  inst.validate();
  require(inst.set_count() < UINT32_MAX && inst.element_count() < UINT32_MAX, ErrorKind::resource,
          "cover instance too large");
  ExactCoverResult res;
  res.witness = greedy_cover(inst, max_uncovered);
  res.greedy_value = res.witness.sets.size();
  Exact ex(inst, max_uncovered, opt);
  res.volume_bound = ex.volume_bound();
  std::size_t ub = res.greedy_value;
  const std::size_t lb = res.volume_bound;
  // local search tries to close the gap from above
  std::vector<std::uint32_t> found;
  while (ub > lb && ex.local_search(ub - 1, res.witness.sets, found)) {
    res.witness.sets = found;
    ub = found.size();
  }
  try {
    while (ub > lb && ex.search(ub - 1, found)) {
      res.witness.sets = found;
      ub = found.size();
    }
  } catch (const Exact::Budget&) {
    fail(ErrorKind::resource, "exact cover node budget exhausted; optimum in [" + std::to_string(lb) + ", " +
                                  std::to_string(ub) + "]");
  }
  res.nodes = ex.nodes();
  res.value = ub;
  res.witness.uncovered = uncovered_weight(inst, res.witness.sets);
  require(res.witness.uncovered <= max_uncovered, ErrorKind::setup, "exact cover witness fails its target");
  return res;
}

}  // namespace dspec
