#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ugclust/common.hpp"
#include "ugclust/graph.hpp"

namespace ugclust {

/**
 * Symmetric table of pairwise connectivity probabilities with Pr[v~v] = 1.
 * The source tag records whether entries are exact or estimated from a
 * sample of possible worlds (and then how many).
 */
class ConnectivityTable {
 public:
  enum class Source { exact, estimated };

  ConnectivityTable(int n, Source source, std::uint64_t sample_count = 0)
      : n_(n), source_(source), samples_(sample_count),
        p_(static_cast<std::size_t>(n + 1) * (n + 1), 0.0) {
    if (n < 1) throw DomainError("table needs at least one node");
    for (NodeId v = 1; v <= n; ++v) at(v, v) = 1.0;
  }

  int node_count() const { return n_; }
  Source source() const { return source_; }
  std::uint64_t sample_count() const { return samples_; }

  double operator()(NodeId u, NodeId v) const {
    check(u);
    check(v);
    return p_[idx(u, v)];
  }

  void set(NodeId u, NodeId v, double p) {
    check(u);
    check(v);
    if (u == v) throw DomainError("diagonal entries are fixed at 1");
    p_[idx(u, v)] = p;
    p_[idx(v, u)] = p;
  }

 private:
  std::size_t idx(NodeId u, NodeId v) const {
    return static_cast<std::size_t>(u) * (n_ + 1) + v;
  }
  double& at(NodeId u, NodeId v) { return p_[idx(u, v)]; }
  void check(NodeId v) const {
    if (v < 1 || v > n_)
      throw DomainError("node " + std::to_string(v) + " outside table of size " +
                        std::to_string(n_));
  }

  int n_;
  Source source_;
  std::uint64_t samples_;
  std::vector<double> p_;
};

/**
 * A clustering given as one (center, member) link per node. Every member is
 * linked to exactly one center and each center is linked to itself.
 */
struct ClusteringSignature {
  std::vector<NodeId> centers;    // ascending, distinct
  std::vector<NodeId> center_of;  // 1-based; center_of[v] = center v links to

  int node_count() const { return static_cast<int>(center_of.size()) - 1; }
  int k() const { return static_cast<int>(centers.size()); }
};

/**
 * Link every node to the center with the highest table probability.
 * Ties go to the smallest center id; centers always link to themselves
 * (their diagonal entry 1 dominates every other probability).
 */
inline ClusteringSignature assign_clusters(const ConnectivityTable& t,
                                           std::span<const NodeId> centers) {
  const int n = t.node_count();
  if (centers.empty()) throw DomainError("need at least one center");
  std::vector<NodeId> cs(centers.begin(), centers.end());
  std::sort(cs.begin(), cs.end());
  if (std::adjacent_find(cs.begin(), cs.end()) != cs.end())
    throw DomainError("duplicate center");
  for (NodeId c : cs)
    if (c < 1 || c > n) throw DomainError("center " + std::to_string(c) + " not a node");

  ClusteringSignature sig;
  sig.centers = std::move(cs);
  sig.center_of.assign(static_cast<std::size_t>(n) + 1, 0);
  for (NodeId v = 1; v <= n; ++v) {
    NodeId best = sig.centers.front();
    double bp = t(best, v);
    for (std::size_t i = 1; i < sig.centers.size(); ++i) {
      double p = t(sig.centers[i], v);
      if (p > bp) {
        bp = p;
        best = sig.centers[i];
      }
    }
    sig.center_of[v] = best;
  }
  return sig;
}

namespace detail {
inline void check_signature(const ConnectivityTable& t, const ClusteringSignature& s) {
  if (s.node_count() != t.node_count())
    throw DomainError("signature covers " + std::to_string(s.node_count()) +
                      " nodes but table has " + std::to_string(t.node_count()));
  if (s.centers.empty()) throw DomainError("signature has no centers");
}
}  // namespace detail

/** Mean link probability: the average over all nodes of Pr[center(v) ~ v]. */
inline double km_value(const ConnectivityTable& t, const ClusteringSignature& s) {
  detail::check_signature(t, s);
  double sum = 0.0;
  for (NodeId v = 1; v <= t.node_count(); ++v) sum += t(s.center_of[v], v);
  return sum / t.node_count();
}

/** Weakest link probability: the minimum over all nodes of Pr[center(v) ~ v]. */
inline double kc_value(const ConnectivityTable& t, const ClusteringSignature& s) {
  detail::check_signature(t, s);
  double worst = 1.0;
  for (NodeId v = 1; v <= t.node_count(); ++v) worst = std::min(worst, t(s.center_of[v], v));
  return worst;
}

}  // namespace ugclust
