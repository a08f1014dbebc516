#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ugclust/common.hpp"
#include "ugclust/sampling.hpp"

namespace ugclust {

struct GreedyResult {
  std::vector<NodeId> selected;  // in pick order
  std::uint64_t evaluations = 0;
};

/**
 * Plain greedy maximization: k rounds, each adding the candidate with the
 * largest marginal gain. Ties go to the smallest node id. The oracle
 * provides gain(u) relative to the committed selection and commit(u).
 */
template <typename Oracle>
GreedyResult greedy_select(std::span<const NodeId> universe, int k, Oracle& oracle) {
  if (k < 1 || static_cast<std::size_t>(k) > universe.size())
    throw DomainError("k must be between 1 and the universe size");
  GreedyResult res;
  std::vector<bool> taken;
  NodeId maxid = *std::max_element(universe.begin(), universe.end());
  taken.assign(static_cast<std::size_t>(maxid) + 1, false);
  std::vector<NodeId> order(universe.begin(), universe.end());
  std::sort(order.begin(), order.end());
  for (int round = 0; round < k; ++round) {
    bool have = false;
    NodeId best = 0;
    double best_gain = 0.0;
    for (NodeId u : order) {
      if (taken[u]) continue;
      double gain = oracle.gain(u);
      ++res.evaluations;
      if (!have || gain > best_gain) {  // ascending scan: ties keep the min id
        have = true;
        best = u;
        best_gain = gain;
      }
    }
    oracle.commit(best);
    taken[best] = true;
    res.selected.push_back(best);
  }
  return res;
}

/** Adapter so any set function g(S) can drive greedy_select. */
template <typename SetFn>
class SetFunctionOracle {
 public:
  explicit SetFunctionOracle(SetFn g) : g_(std::move(g)), value_(g_(std::span<const NodeId>{})) {}

  double gain(NodeId u) {
    scratch_ = selected_;
    scratch_.push_back(u);
    return g_(std::span<const NodeId>(scratch_)) - value_;
  }

  void commit(NodeId u) {
    selected_.push_back(u);
    value_ = g_(std::span<const NodeId>(selected_));
  }

  double value() const { return value_; }
  const std::vector<NodeId>& selected() const { return selected_; }

 private:
  SetFn g_;
  std::vector<NodeId> selected_;
  std::vector<NodeId> scratch_;
  double value_;
};

/** Greedy over an arbitrary set function. */
template <typename SetFn>
GreedyResult greedy(std::span<const NodeId> universe, int k, SetFn&& g) {
  SetFunctionOracle<std::decay_t<SetFn>> oracle(std::forward<SetFn>(g));
  return greedy_select(universe, k, oracle);
}

/**
 * Priority list for lazy greedy selection. Each entry carries an upper
 * bound on its marginal gain; an entry is fresh when the bound was computed
 * against the current selection (then it is the gain, exactly). Submodular
 * gains only shrink as the selection grows, so stale bounds stay valid.
 */
class LazyQueue {
 public:
  struct Entry {
    NodeId node = 0;
    double ub = 0.0;
    bool fresh = false;
  };

  LazyQueue() = default;
  explicit LazyQueue(std::vector<Entry> entries) : entries_(std::move(entries)) { sort(); }

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

  /** Call after the selection changes: every cached bound becomes stale. */
  void invalidate() {
    for (auto& e : entries_) e.fresh = false;
  }

  /**
   * Remove and return a node whose true marginal gain is maximal; among
   * maximal gains the smallest node id is returned. Walks the list head
   * re-evaluating bounds until the best freshened value so far strictly
   * beats the next cached bound (ties keep re-evaluating, which is what
   * makes the min-id guarantee exact); then re-sorts and pops. At the break
   * every unvisited bound sits strictly below a fresh value, so the true
   * maximum is already fresh.
   */
  template <typename Gain>
  Entry pop_max(Gain&& gain, std::uint64_t& evaluations) {
    if (entries_.empty()) throw DomainError("lazy queue exhausted");
    std::size_t i = 0;
    double best_fresh = entries_[0].ub;
    while (true) {
      if (!entries_[i].fresh) {
        entries_[i].ub = gain(entries_[i].node);
        entries_[i].fresh = true;
        ++evaluations;
      }
      best_fresh = i == 0 ? entries_[0].ub : std::max(best_fresh, entries_[i].ub);
      if (i + 1 == entries_.size() || best_fresh > entries_[i + 1].ub) break;
      ++i;
    }
    sort();
    Entry head = entries_.front();
    entries_.erase(entries_.begin());
    return head;
  }

 private:
  void sort() {
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
      return a.ub != b.ub ? a.ub > b.ub : a.node < b.node;
    });
  }

  std::vector<Entry> entries_;
};

/**
 * Seed a lazy queue from per-node component-size sums. Those equal the
 * gain of each node as a first pick of the coverage objective, so entries
 * may be marked fresh for that objective; for any smaller objective they
 * are still valid upper bounds, just stale.
 */
inline LazyQueue component_sum_queue(const SampleSet& r, bool fresh,
                                     std::uint64_t& evaluations) {
  r.require_nonempty();
  std::vector<LazyQueue::Entry> entries;
  const int n = r.graph().node_count();
  entries.reserve(n);
  for (NodeId v = 1; v <= n; ++v)
    entries.push_back({v, component_size_sum(r, v), fresh});
  evaluations += static_cast<std::uint64_t>(n);
  return LazyQueue(std::move(entries));
}

}  // namespace ugclust
