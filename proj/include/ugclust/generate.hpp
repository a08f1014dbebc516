#pragma once

#include <cstdint>
#include <vector>

#include "ugclust/common.hpp"
#include "ugclust/graph.hpp"
#include "ugclust/rng.hpp"

namespace ugclust {

namespace detail {
inline void check_edge_probability(double p) {
  if (!(p > 0.0) || p > 1.0) throw DomainError("edge probability must lie in (0, 1]");
}
}  // namespace detail

inline UncertainGraph path_graph(int n, double p) {
  if (n < 1) throw DomainError("path needs at least one node");
  detail::check_edge_probability(p);
  std::vector<Edge> edges;
  for (NodeId u = 1; u < n; ++u) edges.push_back({u, u + 1, p});
  return UncertainGraph::from_edges(n, edges);
}

inline UncertainGraph cycle_graph(int n, double p) {
  if (n < 3) throw DomainError("cycle needs at least three nodes");
  detail::check_edge_probability(p);
  std::vector<Edge> edges;
  for (NodeId u = 1; u < n; ++u) edges.push_back({u, u + 1, p});
  edges.push_back({1, n, p});
  return UncertainGraph::from_edges(n, edges);
}

/** rows x cols lattice, nodes numbered row-major starting at 1. */
inline UncertainGraph grid_graph(int rows, int cols, double p) {
  if (rows < 1 || cols < 1) throw DomainError("grid needs positive dimensions");
  detail::check_edge_probability(p);
  auto at = [cols](int r, int c) { return static_cast<NodeId>(r * cols + c + 1); };
  std::vector<Edge> edges;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.push_back({at(r, c), at(r, c + 1), p});
      if (r + 1 < rows) edges.push_back({at(r, c), at(r + 1, c), p});
    }
  return UncertainGraph::from_edges(rows * cols, edges);
}

/**
 * Every pair becomes an edge with the given density; kept edges draw their
 * probability uniformly from [pmin, pmax]. The generator walks pairs in
 * canonical order consuming one stream, so a seed fixes the graph exactly.
 */
inline UncertainGraph random_graph(int n, double density, double pmin, double pmax,
                                   std::uint64_t seed) {
  if (n < 1) throw DomainError("graph needs at least one node");
  if (!(density >= 0.0) || density > 1.0)
    throw DomainError("density must lie in [0, 1]");
  if (!(pmin > 0.0) || pmax > 1.0 || pmin > pmax)
    throw DomainError("probability range must satisfy 0 < pmin <= pmax <= 1");
  SplitMix64 rng(seed);
  std::vector<Edge> edges;
  for (NodeId u = 1; u <= n; ++u)
    for (NodeId v = u + 1; v <= n; ++v) {
      if (rng.next_double() >= density) continue;
      double p = pmin + rng.next_double() * (pmax - pmin);
      detail::check_edge_probability(p);
      edges.push_back({u, v, p});
    }
  return UncertainGraph::from_edges(n, edges);
}

}  // namespace ugclust
