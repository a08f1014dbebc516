#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ugclust/common.hpp"

namespace ugclust {

/** Undirected edge that exists with probability p, independently of all others. */
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double p = 0.0;
};

namespace detail {

/** Shortest decimal string that round-trips the double exactly. */
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/**
 * A graph whose edges are present independently with probability p(e) in (0, 1].
 * Nodes are 1-based: 1..n. Edges are stored canonically (u < v, sorted).
 */
class UncertainGraph {
 public:
  UncertainGraph() = default;

  static UncertainGraph from_edges(int n, std::vector<Edge> edges) {
    if (n < 1) throw InputError("node count must be at least 1");
    for (auto& e : edges) {
      if (e.u < 1 || e.u > n || e.v < 1 || e.v > n)
        throw InputError("edge endpoint out of range: " + std::to_string(e.u) + " " +
                         std::to_string(e.v));
      if (e.u == e.v) throw InputError("self-loop at node " + std::to_string(e.u));
      if (!(e.p > 0.0) || e.p > 1.0)
        throw InputError("edge probability must lie in (0, 1], got " +
                         detail::format_double(e.p));
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    for (std::size_t i = 1; i < edges.size(); ++i)
      if (edges[i].u == edges[i - 1].u && edges[i].v == edges[i - 1].v)
        throw InputError("duplicate edge " + std::to_string(edges[i].u) + "-" +
                         std::to_string(edges[i].v));
    UncertainGraph g;
    g.n_ = n;
    g.edges_ = std::move(edges);
    g.incident_.assign(static_cast<std::size_t>(n) + 1, {});
    for (int i = 0; i < static_cast<int>(g.edges_.size()); ++i) {
      g.incident_[g.edges_[i].u].push_back(i);
      g.incident_[g.edges_[i].v].push_back(i);
    }
    return g;
  }

  /**
   * Parse the edge-list format: a header line "n m" followed by m lines
   * "u v p". Lines starting with '#' and blank lines are ignored.
   */
  static UncertainGraph parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    auto next_data_line = [&](bool required) -> bool {
      while (std::getline(in, line)) {
        ++lineno;
        std::size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos || line[i] == '#') continue;
        return true;
      }
      if (required) throw InputError("unexpected end of input at line " + std::to_string(lineno));
      return false;
    };

    if (!next_data_line(false)) throw InputError("empty input");
    long long n = 0, m = 0;
    {
      std::istringstream hs(line);
      std::string extra;
      if (!(hs >> n >> m) || (hs >> extra))
        throw InputError("line " + std::to_string(lineno) + ": expected header \"n m\"");
    }
    if (n < 1) throw InputError("node count must be at least 1");
    if (m < 0) throw InputError("edge count must be nonnegative");

    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m));
    for (long long i = 0; i < m; ++i) {
      next_data_line(true);
      std::istringstream es(line);
      long long u, v;
      double p;
      std::string extra;
      if (!(es >> u >> v >> p) || (es >> extra))
        throw InputError("line " + std::to_string(lineno) + ": expected \"u v p\"");
      if (u < 1 || u > n || v < 1 || v > n)
        throw InputError("line " + std::to_string(lineno) + ": endpoint out of range");
      edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), p});
    }
    if (next_data_line(false))
      throw InputError("line " + std::to_string(lineno) + ": trailing data after edge list");
    try {
      return from_edges(static_cast<int>(n), std::move(edges));
    } catch (const InputError& e) {
      throw InputError(std::string(e.what()));
    }
  }

  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& incident(NodeId v) const { return incident_[v]; }

  /** Canonical emission; parse(to_edge_list()) reproduces the graph byte for byte. */
  std::string to_edge_list() const {
    std::string out = std::to_string(n_) + " " + std::to_string(edges_.size()) + "\n";
    for (const Edge& e : edges_) {
      out += std::to_string(e.u);
      out += ' ';
      out += std::to_string(e.v);
      out += ' ';
      out += detail::format_double(e.p);
      out += '\n';
    }
    return out;
  }

  /** FNV-1a over the canonical structure; identifies the graph in reports and caches. */
  std::uint64_t fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto eat = [&h](std::uint64_t x) {
      for (int i = 0; i < 8; ++i) {
        h ^= (x >> (8 * i)) & 0xff;
        h *= 0x100000001b3ULL;
      }
    };
    eat(static_cast<std::uint64_t>(n_));
    for (const Edge& e : edges_) {
      eat(static_cast<std::uint64_t>(e.u));
      eat(static_cast<std::uint64_t>(e.v));
      eat(std::bit_cast<std::uint64_t>(e.p));
    }
    return h;
  }

  /** Product of all edge probabilities; a positive lower bound on any
      pairwise connectivity within one support component. */
  double edge_probability_product() const {
    double p = 1.0;
    for (const Edge& e : edges_) p *= e.p;
    return p;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> incident_;
};

}  // namespace ugclust
