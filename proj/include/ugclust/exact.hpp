#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "ugclust/common.hpp"
#include "ugclust/graph.hpp"
#include "ugclust/signature.hpp"
#include "ugclust/union_find.hpp"

namespace ugclust {

struct ExactOptions {
  // Enumeration is 2^m over the edges of one support component; this cap
  // keeps a stray large input from hanging the process.
  int max_component_edges = 24;
};

namespace detail {

struct SupportComponent {
  std::vector<NodeId> nodes;
  std::vector<int> edge_ids;
};

inline std::vector<SupportComponent> support_components(const UncertainGraph& g) {
  const int n = g.node_count();
  DisjointSets ds(n);
  for (const Edge& e : g.edges()) ds.unite(e.u, e.v);
  std::vector<int> comp_index(static_cast<std::size_t>(n) + 1, -1);
  std::vector<SupportComponent> comps;
  for (NodeId v = 1; v <= n; ++v) {
    int root = ds.find(v);
    if (comp_index[root] < 0) {
      comp_index[root] = static_cast<int>(comps.size());
      comps.emplace_back();
    }
    comps[comp_index[root]].nodes.push_back(v);
  }
  for (int i = 0; i < g.edge_count(); ++i)
    comps[comp_index[ds.find(g.edges()[i].u)]].edge_ids.push_back(i);
  return comps;
}

/** Kahan-compensated accumulator; keeps 2^m same-sign sums at full precision. */
struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

/**
 * Enumerate all 2^m edge subsets of one support component and accumulate,
 * for every node pair in it, the total probability of subsets in which the
 * pair is connected.
 */
inline void enumerate_component(const UncertainGraph& g, const SupportComponent& comp,
                                int cap, ConnectivityTable& out) {
  const int m = static_cast<int>(comp.edge_ids.size());
  if (m > cap)
    throw CapError("component has " + std::to_string(m) +
                   " edges, above the enumeration cap of " + std::to_string(cap));
  const int c = static_cast<int>(comp.nodes.size());
  if (c < 2) return;

  std::vector<Kahan> acc(static_cast<std::size_t>(c) * c);
  DisjointSets ds(g.node_count());
  std::vector<int> root(c);
  const std::uint64_t total = 1ULL << m;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    double wp = 1.0;
    ds.reset();
    for (int j = 0; j < m; ++j) {
      const Edge& e = g.edges()[comp.edge_ids[j]];
      if (mask & (1ULL << j)) {
        wp *= e.p;
        ds.unite(e.u, e.v);
      } else {
        wp *= 1.0 - e.p;
      }
    }
    if (wp == 0.0) continue;
    for (int i = 0; i < c; ++i) root[i] = ds.find(comp.nodes[i]);
    for (int i = 0; i < c; ++i)
      for (int j = i + 1; j < c; ++j)
        if (root[i] == root[j]) acc[static_cast<std::size_t>(i) * c + j].add(wp);
  }
  for (int i = 0; i < c; ++i)
    for (int j = i + 1; j < c; ++j) {
      double p = acc[static_cast<std::size_t>(i) * c + j].sum;
      out.set(comp.nodes[i], comp.nodes[j], std::min(p, 1.0));
    }
}

}  // namespace detail

/**
 * Exact two-terminal connectivity probabilities by exhaustive enumeration of
 * edge subsets, one support component at a time. Components are filled
 * lazily on first query, under a mutex; values are then served from the
 * cached table. Accumulation is compensated, accurate to ~1e-15; tests use
 * a 1e-12 tolerance.
 */
class ExactOracle {
 public:
  // Holds a pointer to the graph; the graph must outlive the oracle.
  ExactOracle(UncertainGraph&&, ExactOptions = {}) = delete;

  explicit ExactOracle(const UncertainGraph& g, ExactOptions opt = {})
      : g_(&g), opt_(opt), comps_(detail::support_components(g)),
        done_(comps_.size(), false),
        comp_of_(static_cast<std::size_t>(g.node_count()) + 1, -1),
        table_(g.node_count(), ConnectivityTable::Source::exact) {
    for (int i = 0; i < static_cast<int>(comps_.size()); ++i)
      for (NodeId v : comps_[i].nodes) comp_of_[v] = i;
  }

  const UncertainGraph& graph() const { return *g_; }

  double pr_connect(NodeId u, NodeId v) const {
    if (u < 1 || u > g_->node_count() || v < 1 || v > g_->node_count())
      throw DomainError("node out of range");
    if (u == v) return 1.0;
    if (comp_of_[u] != comp_of_[v]) return 0.0;
    fill(comp_of_[u]);
    return table_(u, v);
  }

  /** Full table; forces every component to be enumerated. */
  const ConnectivityTable& table() const {
    for (int i = 0; i < static_cast<int>(comps_.size()); ++i) fill(i);
    return table_;
  }

 private:
  void fill(int ci) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (done_[ci]) return;
    detail::enumerate_component(*g_, comps_[ci], opt_.max_component_edges, table_);
    done_[ci] = true;
  }

  const UncertainGraph* g_;
  ExactOptions opt_;
  std::vector<detail::SupportComponent> comps_;
  mutable std::mutex mu_;
  mutable std::vector<bool> done_;
  std::vector<int> comp_of_;
  mutable ConnectivityTable table_;
};

/** One-shot exact connectivity for a single pair. */
inline double exact_pr_connect(const UncertainGraph& g, NodeId u, NodeId v,
                               ExactOptions opt = {}) {
  return ExactOracle(g, opt).pr_connect(u, v);
}

struct BruteForceResult {
  std::vector<NodeId> centers;
  double objective = 0.0;
};

struct BruteForceOptions {
  std::uint64_t max_center_sets = 2'000'000;
};

namespace detail {

inline double ln_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

template <typename Score>
BruteForceResult best_center_set(int n, int k, const BruteForceOptions& opt, Score&& score) {
  if (k < 1 || k > n)
    throw DomainError("k must be between 1 and n, got " + std::to_string(k));
  if (ln_binomial(n, k) > std::log(static_cast<double>(opt.max_center_sets)))
    throw CapError("too many center sets to enumerate");

  std::vector<NodeId> cur(k);
  for (int i = 0; i < k; ++i) cur[i] = static_cast<NodeId>(i + 1);
  BruteForceResult best;
  bool have = false;
  while (true) {
    double s = score(cur);
    // Strict improvement only: combinations arrive in lexicographic order,
    // so ties keep the lexicographically smallest set.
    if (!have || s > best.objective) {
      best.centers = cur;
      best.objective = s;
      have = true;
    }
    int i = k - 1;
    while (i >= 0 && cur[i] == n - k + i + 1) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return best;
}

}  // namespace detail

/** Exhaustive optimum of the mean-link objective over all k-subsets of nodes. */
inline BruteForceResult brute_force_kmedian(const UncertainGraph& g, int k,
                                            const ExactOracle& oracle,
                                            BruteForceOptions opt = {}) {
  const ConnectivityTable& t = oracle.table();
  const int n = g.node_count();
  return detail::best_center_set(n, k, opt, [&](const std::vector<NodeId>& c) {
    double sum = 0.0;
    for (NodeId v = 1; v <= n; ++v) {
      double f = 0.0;
      for (NodeId u : c) f = std::max(f, t(u, v));
      sum += f;
    }
    return sum / n;
  });
}

/** Exhaustive optimum of the weakest-link objective over all k-subsets of nodes. */
inline BruteForceResult brute_force_kcenter(const UncertainGraph& g, int k,
                                            const ExactOracle& oracle,
                                            BruteForceOptions opt = {}) {
  const ConnectivityTable& t = oracle.table();
  const int n = g.node_count();
  return detail::best_center_set(n, k, opt, [&](const std::vector<NodeId>& c) {
    double worst = 1.0;
    for (NodeId v = 1; v <= n; ++v) {
      double f = 0.0;
      for (NodeId u : c) f = std::max(f, t(u, v));
      worst = std::min(worst, f);
    }
    return worst;
  });
}

inline BruteForceResult brute_force_kmedian(const UncertainGraph& g, int k) {
  ExactOracle oracle(g);
  return brute_force_kmedian(g, k, oracle);
}

inline BruteForceResult brute_force_kcenter(const UncertainGraph& g, int k) {
  ExactOracle oracle(g);
  return brute_force_kcenter(g, k, oracle);
}

}  // namespace ugclust
