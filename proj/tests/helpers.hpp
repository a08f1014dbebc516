#pragma once

#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

#include <ugclust/ugclust.hpp>

namespace helpers {

using namespace ugclust;

inline UncertainGraph g1() { return UncertainGraph::from_edges(2, {{1, 2, 0.5}}); }
inline UncertainGraph g2() { return path_graph(3, 0.5); }
inline UncertainGraph g3() {
  return UncertainGraph::from_edges(3, {{1, 2, 0.5}, {1, 3, 0.5}, {2, 3, 0.5}});
}

/**
 * Every connected labeled graph with 2..max_n nodes and at most max_m edges,
 * probabilities cycling 0.5, 0.3, 0.8 along the canonical edge order. Small
 * enough to brute-force, rich enough to exercise every tie and asymmetry.
 */
inline std::vector<UncertainGraph> connected_family(int max_n = 6, int max_m = 8) {
  static constexpr double probs[3] = {0.5, 0.3, 0.8};
  std::vector<UncertainGraph> out;
  for (int n = 2; n <= max_n; ++n) {
    std::vector<std::pair<NodeId, NodeId>> all;
    for (NodeId u = 1; u <= n; ++u)
      for (NodeId v = u + 1; v <= n; ++v) all.emplace_back(u, v);
    const int total = static_cast<int>(all.size());
    for (std::uint32_t mask = 1; mask < (1u << total); ++mask) {
      const int m = std::popcount(mask);
      if (m < n - 1 || m > max_m) continue;
      DisjointSets ds(n);
      std::vector<Edge> edges;
      int idx = 0;
      for (int b = 0; b < total; ++b) {
        if (!(mask >> b & 1u)) continue;
        edges.push_back({all[b].first, all[b].second, probs[idx % 3]});
        ds.unite(all[b].first, all[b].second);
        ++idx;
      }
      bool connected = true;
      for (NodeId v = 2; v <= n && connected; ++v) connected = ds.find(v) == ds.find(1);
      if (!connected) continue;
      out.push_back(UncertainGraph::from_edges(n, std::move(edges)));
    }
  }
  return out;
}

/** Uniform random fixture for statistical harnesses. */
inline UncertainGraph random_fixture(SplitMix64& rng, int max_n, int max_m,
                                     bool require_connected = false) {
  while (true) {
    const int n = 2 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_n - 1));
    std::vector<std::pair<NodeId, NodeId>> all;
    for (NodeId u = 1; u <= n; ++u)
      for (NodeId v = u + 1; v <= n; ++v) all.emplace_back(u, v);
    for (std::size_t i = all.size(); i > 1; --i)
      std::swap(all[i - 1], all[rng.next() % i]);
    const std::size_t cap = std::min<std::size_t>(max_m, all.size());
    const std::size_t m = 1 + rng.next() % cap;
    std::vector<Edge> edges;
    DisjointSets ds(n);
    for (std::size_t i = 0; i < m; ++i) {
      double p = 0.05 + 0.95 * rng.next_double();
      edges.push_back({all[i].first, all[i].second, p});
      ds.unite(all[i].first, all[i].second);
    }
    if (require_connected) {
      bool connected = true;
      for (NodeId v = 2; v <= n && connected; ++v) connected = ds.find(v) == ds.find(1);
      if (!connected) continue;
    }
    return UncertainGraph::from_edges(n, std::move(edges));
  }
}

}  // namespace helpers
