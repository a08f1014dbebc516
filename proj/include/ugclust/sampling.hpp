#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "ugclust/common.hpp"
#include "ugclust/graph.hpp"
#include "ugclust/rng.hpp"
#include "ugclust/signature.hpp"
#include "ugclust/union_find.hpp"

namespace ugclust {

/**
 * One sampled subgraph, stored as its connected-component structure.
 * Labels are canonical: label[v] is the smallest node in v's component,
 * so two draws of the same world compare equal regardless of how they
 * were produced. size[v] is the order of v's component.
 */
struct PossibleWorld {
  std::vector<NodeId> label;  // 1-based
  std::vector<int> size;      // 1-based

  bool connected(NodeId u, NodeId v) const { return label[u] == label[v]; }
};

/** Draw one world: each edge is kept independently with its probability. */
inline PossibleWorld draw_world(const UncertainGraph& g, SplitMix64& rng) {
  const int n = g.node_count();
  DisjointSets ds(n);
  for (const Edge& e : g.edges())
    if (rng.next_double() < e.p) ds.unite(e.u, e.v);
  PossibleWorld w;
  w.label.assign(static_cast<std::size_t>(n) + 1, 0);
  w.size.assign(static_cast<std::size_t>(n) + 1, 0);
  for (NodeId v = 1; v <= n; ++v) w.label[v] = static_cast<NodeId>(ds.find(v));
  for (NodeId v = 1; v <= n; ++v) ++w.size[w.label[v]];
  for (NodeId v = 1; v <= n; ++v) w.size[v] = w.size[w.label[v]];
  return w;
}

/** The world at a fixed (seed, index) coordinate; the basis of reproducibility. */
inline PossibleWorld world_at(const UncertainGraph& g, std::uint64_t seed,
                              std::uint64_t index) {
  SplitMix64 rng(mix_seed(seed, index));
  return draw_world(g, rng);
}

/**
 * An append-only pool of sampled worlds drawn from one deterministic stream:
 * world i of a pool is world_at(graph, seed, start_index + i). Pairwise
 * co-connectivity counts are maintained incrementally as integers, so every
 * estimator below is a single integer sum divided once by the pool size,
 * bit-stable and independent of evaluation order.
 */
class SampleSet {
 public:
  // Holds a pointer to the graph; the graph must outlive the pool.
  SampleSet(UncertainGraph&&, std::uint64_t, std::uint64_t = 0) = delete;
  static SampleSet generate(UncertainGraph&&, std::size_t, std::uint64_t) = delete;

  SampleSet(const UncertainGraph& g, std::uint64_t seed, std::uint64_t start_index = 0)
      : g_(&g), seed_(seed), start_(start_index),
        counts_(sq(g.node_count()), 0),
        rows_(static_cast<std::size_t>(g.node_count()) + 1, 0) {}

  static SampleSet generate(const UncertainGraph& g, std::size_t count,
                            std::uint64_t seed) {
    SampleSet r(g, seed);
    r.append(count);
    return r;
  }

  void append(std::size_t count) {
    for (std::size_t i = 0; i < count; ++i)
      absorb(world_at(*g_, seed_, start_ + worlds_.size()));
  }

  const UncertainGraph& graph() const { return *g_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t start_index() const { return start_; }
  std::size_t size() const { return worlds_.size(); }
  bool empty() const { return worlds_.empty(); }
  const PossibleWorld& world(std::size_t i) const { return worlds_[i]; }

  /** Number of worlds in which u and v are connected (n per-diagonal). */
  std::int64_t pair_count(NodeId u, NodeId v) const {
    return counts_[static_cast<std::size_t>(u) * (g_->node_count() + 1) + v];
  }

  /** Sum over worlds of the size of v's component (= row sum of pair counts). */
  std::int64_t component_sum_count(NodeId v) const { return rows_[v]; }

  ConnectivityTable estimate_table() const {
    require_nonempty();
    const int n = g_->node_count();
    ConnectivityTable t(n, ConnectivityTable::Source::estimated, worlds_.size());
    for (NodeId u = 1; u <= n; ++u)
      for (NodeId v = u + 1; v <= n; ++v)
        t.set(u, v, static_cast<double>(pair_count(u, v)) / worlds_.size());
    return t;
  }

  void require_nonempty() const {
    if (worlds_.empty()) throw DomainError("sample pool is empty");
  }

  static SampleSet from_worlds(UncertainGraph&&, std::uint64_t, std::uint64_t,
                               std::vector<PossibleWorld>) = delete;

  /** Used by the cache loader; count/row bookkeeping is rebuilt from labels. */
  static SampleSet from_worlds(const UncertainGraph& g, std::uint64_t seed,
                               std::uint64_t start_index,
                               std::vector<PossibleWorld> worlds) {
    SampleSet r(g, seed, start_index);
    for (auto& w : worlds) r.absorb(std::move(w));
    return r;
  }

 private:
  static std::size_t sq(int n) {
    return static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1);
  }

  void absorb(PossibleWorld w) {
    const int n = g_->node_count();
    // Group members by their canonical component label.
    groups_.assign(static_cast<std::size_t>(n) + 1, {});
    for (NodeId v = 1; v <= n; ++v) groups_[w.label[v]].push_back(v);
    for (NodeId root = 1; root <= n; ++root) {
      const auto& mem = groups_[root];
      for (std::size_t i = 0; i < mem.size(); ++i) {
        ++counts_[static_cast<std::size_t>(mem[i]) * (n + 1) + mem[i]];
        rows_[mem[i]] += static_cast<std::int64_t>(mem.size());
        for (std::size_t j = i + 1; j < mem.size(); ++j) {
          ++counts_[static_cast<std::size_t>(mem[i]) * (n + 1) + mem[j]];
          ++counts_[static_cast<std::size_t>(mem[j]) * (n + 1) + mem[i]];
        }
      }
    }
    worlds_.push_back(std::move(w));
  }

  const UncertainGraph* g_;
  std::uint64_t seed_;
  std::uint64_t start_;
  std::vector<PossibleWorld> worlds_;
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> rows_;
  std::vector<std::vector<NodeId>> groups_;  // scratch, reused across absorbs
};

// ---- estimators ------------------------------------------------------------

/** Fraction of worlds in which u and v are connected. */
inline double pr_hat(const SampleSet& r, NodeId u, NodeId v) {
  r.require_nonempty();
  return static_cast<double>(r.pair_count(u, v)) / r.size();
}

/** Estimated mean link probability of a signature. */
inline double km_hat(const SampleSet& r, const ClusteringSignature& s) {
  r.require_nonempty();
  const int n = r.graph().node_count();
  if (s.node_count() != n) throw DomainError("signature does not match sampled graph");
  std::int64_t total = 0;
  for (NodeId v = 1; v <= n; ++v) total += r.pair_count(s.center_of[v], v);
  return static_cast<double>(total) / (static_cast<double>(r.size()) * n);
}

/** Estimated weakest link probability of a signature. */
inline double kc_hat(const SampleSet& r, const ClusteringSignature& s) {
  r.require_nonempty();
  const int n = r.graph().node_count();
  if (s.node_count() != n) throw DomainError("signature does not match sampled graph");
  std::int64_t worst = r.size();
  for (NodeId v = 1; v <= n; ++v)
    worst = std::min(worst, r.pair_count(s.center_of[v], v));
  return static_cast<double>(worst) / r.size();
}

namespace detail {
inline std::int64_t best_pair_count(const SampleSet& r, std::span<const NodeId> centers,
                                    NodeId v) {
  if (centers.empty()) throw DomainError("need at least one center");
  std::int64_t best = 0;
  for (NodeId c : centers) best = std::max(best, r.pair_count(c, v));
  return best;
}
}  // namespace detail

/** Estimated best connectivity from v into the center set. */
inline double f_hat(const SampleSet& r, NodeId v, std::span<const NodeId> centers) {
  r.require_nonempty();
  return static_cast<double>(detail::best_pair_count(r, centers, v)) / r.size();
}

/** Estimated coverage: sum of f_hat over all nodes. */
inline double coverage_hat(const SampleSet& r, std::span<const NodeId> centers) {
  r.require_nonempty();
  std::int64_t total = 0;
  for (NodeId v = 1; v <= r.graph().node_count(); ++v)
    total += detail::best_pair_count(r, centers, v);
  return static_cast<double>(total) / r.size();
}

/** Estimated threshold potential: sum over nodes of min(q, f_hat). */
inline double l_hat(const SampleSet& r, double q, std::span<const NodeId> centers) {
  r.require_nonempty();
  if (!(q > 0.0) || q > 1.0) throw DomainError("threshold q must lie in (0, 1]");
  double total = 0.0;
  for (NodeId v = 1; v <= r.graph().node_count(); ++v) {
    double f = centers.empty()
                   ? 0.0
                   : static_cast<double>(detail::best_pair_count(r, centers, v)) / r.size();
    total += std::min(q, f);
  }
  return total;
}

/**
 * Mean size of v's component across worlds. Arithmetic matches
 * coverage_hat(r, {v}) exactly: both are the same integer divided by |R|.
 */
inline double component_size_sum(const SampleSet& r, NodeId v) {
  r.require_nonempty();
  return static_cast<double>(r.component_sum_count(v)) / r.size();
}

// ---- deviation bound and sample-size formulas ------------------------------

struct TailParams {
  double eps = 0.0;   // absolute deviation, > 0
  double mean = 0.0;  // true value being estimated, in [0, 1]
  std::uint64_t samples = 0;
};

/** Upper bound on Pr[estimate - mean >= eps] for a mean of [0,1] samples. */
inline double tail_bound(const TailParams& p) {
  if (!(p.eps > 0.0)) throw DomainError("deviation must be positive");
  if (p.mean < 0.0 || p.mean > 1.0) throw DomainError("mean must lie in [0, 1]");
  if (p.samples == 0) throw DomainError("need at least one sample");
  return std::exp(-3.0 * p.eps * p.eps * static_cast<double>(p.samples) /
                  (2.0 * (p.eps + p.mean)));
}

namespace detail {
inline double ln_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}
inline void check_eps(double e, const char* name) {
  if (!(e > 0.0) || e >= 1.0)
    throw DomainError(std::string(name) + " must lie in (0, 1)");
}
inline void check_delta(double d) {
  if (!(d > 0.0) || d >= 1.0) throw DomainError("delta must lie in (0, 1)");
}
inline void check_opt_lb(double b) {
  if (!(b > 0.0) || b > 1.0) throw DomainError("optimum lower bound must lie in (0, 1]");
}
inline std::uint64_t ceil_to_count(double x, const char* what) {
  if (!std::isfinite(x) || x >= 1e18)
    throw CapError(std::string(what) + " requires an astronomically large sample count");
  return static_cast<std::uint64_t>(std::ceil(x));
}
}  // namespace detail

/**
 * Worlds sufficient for the mean-link greedy to hit its approximation target
 * with probability 1 - delta, given a lower bound on the optimum.
 */
inline std::uint64_t samples_for_kmedian(int n, int k, double eps, double delta,
                                         double opt_lower_bound) {
  if (k < 1 || k > n) throw DomainError("k must be between 1 and n");
  detail::check_eps(eps, "eps");
  detail::check_delta(delta);
  detail::check_opt_lb(opt_lower_bound);
  const double e = std::exp(1.0);
  double lnC = detail::ln_choose(n, k);
  // ln(C(n,k) + 1) without overflowing C(n,k) itself.
  double ln_c1 = lnC + std::log1p(std::exp(-lnC));
  double v = 2.0 * (2.0 * e - 1.0) * (e * eps + 2.0 * e - 1.0) /
             (3.0 * e * e * eps * eps * opt_lower_bound) * (ln_c1 - std::log(delta));
  return detail::ceil_to_count(v, "mean-link bound");
}

/**
 * Worlds sufficient for the sampled farthest-first traversal to carry its
 * squared-optimum guarantee with probability 1 - delta.
 */
inline std::uint64_t samples_for_kcenter_simple(int n, double eps1, double eps2,
                                                double delta, double opt_lower_bound) {
  if (n < 2) throw DomainError("need at least two nodes");
  detail::check_eps(eps1, "eps1");
  detail::check_eps(eps2, "eps2");
  detail::check_delta(delta);
  detail::check_opt_lb(opt_lower_bound);
  double b2 = opt_lower_bound * opt_lower_bound;
  double coef = std::max(2.0 * (1.0 + eps1) / (3.0 * eps1 * eps1 * b2),
                         2.0 * (1.0 - eps1) / (3.0 * eps2 * eps2 * b2));
  double v = coef * std::log(static_cast<double>(n) * (n - 1) / delta);
  return detail::ceil_to_count(v, "weakest-link bound");
}

/**
 * Worlds sufficient for one bisection probe of the sampled weakest-link
 * search, given the probe threshold as the optimum lower bound.
 */
inline std::uint64_t samples_for_kcenter_bicriteria(int n, int k, double eps3,
                                                    double eps, double delta,
                                                    double opt_lower_bound) {
  if (k < 1 || k > n) throw DomainError("k must be between 1 and n");
  detail::check_eps(eps3, "eps3");
  detail::check_eps(eps, "eps");
  detail::check_delta(delta);
  detail::check_opt_lb(opt_lower_bound);
  double v = 2.0 * (1.0 + eps3) /
             (3.0 * eps3 * eps3 * (1.0 - eps) * opt_lower_bound) *
             std::log((static_cast<double>(n) * n + n - 2.0 * k) / (2.0 * delta));
  return detail::ceil_to_count(v, "bisection probe bound");
}

// ---- binary world cache -----------------------------------------------------

namespace detail {
constexpr std::uint32_t kCacheMagic = 0x55474353;  // "UGCS"
constexpr std::uint32_t kCacheVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw InputError("world cache truncated");
  return v;
}
}  // namespace detail

/** Write a pool to a versioned binary cache keyed by the graph fingerprint. */
inline void write_sample_cache(std::ostream& out, const SampleSet& r) {
  detail::put(out, detail::kCacheMagic);
  detail::put(out, detail::kCacheVersion);
  detail::put(out, r.graph().fingerprint());
  detail::put(out, r.seed());
  detail::put(out, r.start_index());
  detail::put(out, static_cast<std::uint64_t>(r.size()));
  detail::put(out, static_cast<std::uint32_t>(r.graph().node_count()));
  for (std::size_t i = 0; i < r.size(); ++i)
    for (NodeId v = 1; v <= r.graph().node_count(); ++v)
      detail::put(out, static_cast<std::int32_t>(r.world(i).label[v]));
}

inline void write_sample_cache(const std::string& path, const SampleSet& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open cache file for writing: " + path);
  write_sample_cache(out, r);
  if (!out) throw InputError("failed writing cache file: " + path);
}

/** Load a cache; the graph must match the stored fingerprint. */
inline SampleSet read_sample_cache(std::istream& in, const UncertainGraph& g) {
  if (detail::get<std::uint32_t>(in) != detail::kCacheMagic)
    throw InputError("not a world cache file");
  if (detail::get<std::uint32_t>(in) != detail::kCacheVersion)
    throw InputError("unsupported world cache version");
  auto fp = detail::get<std::uint64_t>(in);
  if (fp != g.fingerprint()) throw InputError("world cache was built for a different graph");
  auto seed = detail::get<std::uint64_t>(in);
  auto start = detail::get<std::uint64_t>(in);
  auto count = detail::get<std::uint64_t>(in);
  auto n = detail::get<std::uint32_t>(in);
  if (n != static_cast<std::uint32_t>(g.node_count()))
    throw InputError("world cache node count mismatch");
  std::vector<PossibleWorld> worlds;
  worlds.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    PossibleWorld w;
    w.label.assign(static_cast<std::size_t>(n) + 1, 0);
    w.size.assign(static_cast<std::size_t>(n) + 1, 0);
    for (std::uint32_t v = 1; v <= n; ++v) {
      auto lab = detail::get<std::int32_t>(in);
      if (lab < 1 || lab > static_cast<std::int32_t>(n))
        throw InputError("world cache has a corrupt label");
      w.label[v] = lab;
    }
    for (std::uint32_t v = 1; v <= n; ++v) ++w.size[w.label[v]];
    for (std::uint32_t v = 1; v <= n; ++v) w.size[v] = w.size[w.label[v]];
    worlds.push_back(std::move(w));
  }
  return SampleSet::from_worlds(g, seed, start, std::move(worlds));
}

inline SampleSet read_sample_cache(const std::string& path, const UncertainGraph& g) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open cache file: " + path);
  return read_sample_cache(in, g);
}

}  // namespace ugclust
