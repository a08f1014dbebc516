#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ugclust/common.hpp"
#include "ugclust/exact.hpp"
#include "ugclust/graph.hpp"
#include "ugclust/greedy.hpp"
#include "ugclust/report.hpp"
#include "ugclust/rng.hpp"
#include "ugclust/sampling.hpp"
#include "ugclust/signature.hpp"

namespace ugclust {

/**
 * Marginal-gain oracle for the coverage objective over a connectivity table:
 * the sum over nodes of the best probability into the selection.
 */
class TableCoverageOracle {
 public:
  explicit TableCoverageOracle(const ConnectivityTable& t)
      : t_(&t), best_(static_cast<std::size_t>(t.node_count()) + 1, 0.0) {}

  double gain(NodeId u) const {
    double g = 0.0;
    for (NodeId v = 1; v <= t_->node_count(); ++v) {
      double p = (*t_)(u, v);
      if (p > best_[v]) g += p - best_[v];
    }
    return g;
  }

  void commit(NodeId u) {
    for (NodeId v = 1; v <= t_->node_count(); ++v)
      best_[v] = std::max(best_[v], (*t_)(u, v));
  }

  double value() const {
    return std::accumulate(best_.begin() + 1, best_.end(), 0.0);
  }

 private:
  const ConnectivityTable* t_;
  std::vector<double> best_;
};

/**
 * Same objective over a sample pool. Gains are computed as integer world
 * counts and divided once by the pool size, so two equal gains compare
 * equal exactly and tie-breaking is reproducible.
 */
class SampleCoverageOracle {
 public:
  explicit SampleCoverageOracle(const SampleSet& r)
      : r_(&r), best_(static_cast<std::size_t>(r.graph().node_count()) + 1, 0) {
    r.require_nonempty();
  }

  double gain(NodeId u) const {
    std::int64_t g = 0;
    for (NodeId v = 1; v <= r_->graph().node_count(); ++v) {
      std::int64_t c = r_->pair_count(u, v);
      if (c > best_[v]) g += c - best_[v];
    }
    return static_cast<double>(g) / r_->size();
  }

  void commit(NodeId u) {
    for (NodeId v = 1; v <= r_->graph().node_count(); ++v)
      best_[v] = std::max(best_[v], r_->pair_count(u, v));
  }

  double value() const {
    std::int64_t s = std::accumulate(best_.begin() + 1, best_.end(), std::int64_t{0});
    return static_cast<double>(s) / r_->size();
  }

 private:
  const SampleSet* r_;
  std::vector<std::int64_t> best_;
};

namespace detail {

inline std::vector<NodeId> all_nodes(int n) {
  std::vector<NodeId> v(n);
  std::iota(v.begin(), v.end(), NodeId{1});
  return v;
}

}  // namespace detail

/** Greedy coverage maximization against the exact connectivity table. */
inline SolveReport solve_kmedian_oracle(const UncertainGraph& g, int k,
                                        const ExactOracle& oracle) {
  const ConnectivityTable& t = oracle.table();
  TableCoverageOracle cov(t);
  auto nodes = detail::all_nodes(g.node_count());
  GreedyResult gr = greedy_select(std::span<const NodeId>(nodes), k, cov);
  SolveReport rep = detail::base_report(g, k, "oracle-greedy", "km");
  ClusteringSignature sig = assign_clusters(t, gr.selected);
  rep.centers = sig.centers;
  rep.center_of = sig.center_of;
  rep.objective = km_value(t, sig);
  rep.table_source = "exact";
  rep.coverage = cov.value();
  rep.evaluations = gr.evaluations;
  return rep;
}

/**
 * Row-sum baseline: rank nodes by their total connectivity to all nodes and
 * take the top k. Cheap, and its mean-link value is within a factor k of
 * the optimum; the bounds field carries that certificate.
 */
inline SolveReport solve_kmedian_baseline(const UncertainGraph& g, int k,
                                          const ExactOracle& oracle) {
  const int n = g.node_count();
  if (k < 1 || k > n) throw DomainError("k must be between 1 and n");
  const ConnectivityTable& t = oracle.table();
  std::vector<std::pair<double, NodeId>> scored;
  scored.reserve(n);
  for (NodeId u = 1; u <= n; ++u) {
    double row = 0.0;
    for (NodeId v = 1; v <= n; ++v) row += t(u, v);
    scored.push_back({row, u});
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<NodeId> centers;
  for (int i = 0; i < k; ++i) centers.push_back(scored[i].second);

  SolveReport rep = detail::base_report(g, k, "kmd2", "km");
  ClusteringSignature sig = assign_clusters(t, centers);
  rep.centers = sig.centers;
  rep.center_of = sig.center_of;
  rep.objective = km_value(t, sig);
  rep.table_source = "exact";
  rep.bounds = {{"lb", rep.objective}, {"ub", std::min(1.0, k * rep.objective)}};
  return rep;
}

namespace detail {

/** Shared core: greedy coverage over a pool, plain or lazy; identical picks. */
inline GreedyResult sampled_coverage_greedy(const SampleSet& r, int k, bool lazy) {
  const int n = r.graph().node_count();
  if (k < 1 || k > n) throw DomainError("k must be between 1 and n");
  SampleCoverageOracle cov(r);
  if (!lazy) {
    auto nodes = all_nodes(n);
    return greedy_select(std::span<const NodeId>(nodes), k, cov);
  }
  GreedyResult res;
  LazyQueue queue = component_sum_queue(r, /*fresh=*/true, res.evaluations);
  auto gain = [&cov](NodeId u) { return cov.gain(u); };
  for (int round = 0; round < k; ++round) {
    LazyQueue::Entry e = queue.pop_max(gain, res.evaluations);
    cov.commit(e.node);
    queue.invalidate();
    res.selected.push_back(e.node);
  }
  return res;
}

inline SolveReport sampled_kmedian_report(const UncertainGraph& g, int k,
                                          const SampleSet& r, std::string algorithm,
                                          const GreedyResult& gr) {
  SolveReport rep = base_report(g, k, std::move(algorithm), "km");
  ConnectivityTable t = r.estimate_table();
  ClusteringSignature sig = assign_clusters(t, gr.selected);
  rep.centers = sig.centers;
  rep.center_of = sig.center_of;
  rep.objective = km_hat(r, sig);
  rep.table_source = "estimated";
  rep.coverage = coverage_hat(r, gr.selected);
  rep.seed = r.seed();
  rep.pools = {{"r", r.size()}};
  rep.evaluations = gr.evaluations;
  return rep;
}

}  // namespace detail

/** Greedy coverage maximization against a sampled pool (full scans). */
inline SolveReport search_kmedian(const UncertainGraph& g, int k, const SampleSet& r) {
  GreedyResult gr = detail::sampled_coverage_greedy(r, k, /*lazy=*/false);
  return detail::sampled_kmedian_report(g, k, r, "search", gr);
}

/** Same selection as search_kmedian, but via the lazy queue (fewer evaluations). */
inline SolveReport search_kmedian_lazy(const UncertainGraph& g, int k,
                                       const SampleSet& r) {
  GreedyResult gr = detail::sampled_coverage_greedy(r, k, /*lazy=*/true);
  return detail::sampled_kmedian_report(g, k, r, "search-plus", gr);
}

struct AdaptiveOptions {
  std::uint64_t max_pool = 10'000'000;
};

/**
 * Adaptive sampling: run the sampled greedy on one pool, certify the result
 * against an independent validation pool, and double both pools until the
 * certificate reaches the target ratio or the worst-case pool size is hit.
 */
inline SolveReport solve_kmedian_adaptive(const UncertainGraph& g, int k, double eps,
                                          double delta, std::uint64_t seed,
                                          AdaptiveOptions opt = {}) {
  const int n = g.node_count();
  if (k < 1 || k > n) throw DomainError("k must be between 1 and n");
  const double target = 1.0 - 1.0 / std::exp(1.0) - eps;
  if (!(eps > 0.0) || target <= 0.0)
    throw DomainError("eps must lie in (0, 1 - 1/e) for the adaptive solver");
  detail::check_delta(delta);

  const std::uint64_t t_max =
      samples_for_kmedian(n, k, eps, delta, static_cast<double>(k) / n);
  const std::uint64_t t0 = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(
             std::ceil(static_cast<double>(t_max) * eps * eps * k / n)));
  const std::uint64_t i_max = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(
             std::ceil(std::log2(static_cast<double>(t_max) / static_cast<double>(t0)))));

  SampleSet r1(g, mix_seed(seed, 1));
  SampleSet r2(g, mix_seed(seed, 2));
  r1.append(t0);
  r2.append(t0);

  SolveReport rep = detail::base_report(g, k, "adaptive", "km");
  rep.seed = seed;
  rep.parameters = {{"epsilon", eps}, {"delta", delta}};

  const double a = std::log(3.0 * static_cast<double>(i_max) / delta);
  std::uint64_t evals = 0;
  for (std::uint64_t i = 1;; ++i) {
    GreedyResult gr = detail::sampled_coverage_greedy(r1, k, /*lazy=*/false);
    evals += gr.evaluations;
    ClusteringSignature sig = assign_clusters(r1.estimate_table(), gr.selected);

    const double theta = static_cast<double>(r1.size());
    const double u6 = a / (6.0 * theta);
    double lb = std::pow(std::sqrt(km_hat(r2, sig)) - std::sqrt(u6), 2) - u6;
    lb = std::clamp(lb, 0.0, 1.0);
    double ub = std::pow(std::sqrt(km_hat(r1, sig) / (1.0 - 1.0 / std::exp(1.0)) +
                                   2.0 * a / (3.0 * theta)) +
                             std::sqrt(u6),
                         2) -
                u6;
    ub = std::max(ub, lb);

    const bool fired = ub > 0.0 && lb / ub >= target;
    if (fired || i == i_max) {
      rep.centers = sig.centers;
      rep.center_of = sig.center_of;
      rep.objective = km_hat(r1, sig);
      rep.table_source = "estimated";
      rep.bounds = {{"lb", lb}, {"ub", ub}};
      rep.pools = {{"r1", r1.size()}, {"r2", r2.size()}};
      rep.rounds = i;
      rep.evaluations = evals;
      rep.certified = fired;
      return rep;
    }
    if (r1.size() * 2 > opt.max_pool)
      throw CapError("adaptive pool would exceed the configured maximum");
    r1.append(r1.size());
    r2.append(r2.size());
  }
}

}  // namespace ugclust
