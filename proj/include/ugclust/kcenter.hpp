#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
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
 * Connectivity as a distance: -ln p. Multiplying probabilities along a path
 * turns into adding distances, and the product triangle inequality on exact
 * connectivities makes this a metric. p=0 is infinitely far.
 */
inline double log_distance(double p) {
  if (!(p >= 0.0) || p > 1.0) throw DomainError("probability must lie in [0, 1]");
  if (p == 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(p);
}

namespace detail {

/**
 * Farthest-first traversal, parameterized over the link strength between a
 * placed center and a node. Works on doubles (exact table) and on raw world
 * counts (sample pool) alike: farthest means weakest best link, so we take
 * the argmin of the running maxima, lowest node ID on ties. The seed center
 * is node 1 for reproducibility.
 */
template <typename Value, typename Link>
std::vector<NodeId> farthest_first(int n, int k, Value zero, Link&& link) {
  if (k < 1 || k > n) throw DomainError("k must be between 1 and n");
  std::vector<NodeId> centers{1};
  std::vector<Value> best(static_cast<std::size_t>(n) + 1, zero);
  std::vector<char> chosen(static_cast<std::size_t>(n) + 1, 0);
  chosen[1] = 1;
  for (NodeId v = 1; v <= n; ++v) best[v] = link(NodeId{1}, v);
  while (static_cast<int>(centers.size()) < k) {
    NodeId far = 0;
    for (NodeId v = 1; v <= n; ++v) {
      if (chosen[v]) continue;
      if (far == 0 || best[v] < best[far]) far = v;
    }
    centers.push_back(far);
    chosen[far] = 1;
    for (NodeId v = 1; v <= n; ++v) best[v] = std::max(best[v], link(far, v));
  }
  return centers;
}

}  // namespace detail

/** Farthest-first traversal against the exact connectivity table. */
inline SolveReport solve_kcenter_gonzalez(const UncertainGraph& g, int k,
                                          const ExactOracle& oracle) {
  const ConnectivityTable& t = oracle.table();
  auto centers = detail::farthest_first<double>(
      g.node_count(), k, 0.0, [&t](NodeId c, NodeId v) { return t(c, v); });
  SolveReport rep = detail::base_report(g, k, "gonzalez", "kc");
  ClusteringSignature sig = assign_clusters(t, centers);
  rep.centers = sig.centers;
  rep.center_of = sig.center_of;
  rep.objective = kc_value(t, sig);
  rep.table_source = "exact";
  return rep;
}

/** Farthest-first traversal against a sampled pool, compared in world counts. */
inline SolveReport solve_kcenter_gonzalez_sampled(const UncertainGraph& g, int k,
                                                  const SampleSet& r) {
  r.require_nonempty();
  auto centers = detail::farthest_first<std::int64_t>(
      g.node_count(), k, std::int64_t{0},
      [&r](NodeId c, NodeId v) { return r.pair_count(c, v); });
  SolveReport rep = detail::base_report(g, k, "gonzalez-sampled", "kc");
  ClusteringSignature sig = assign_clusters(r.estimate_table(), centers);
  rep.centers = sig.centers;
  rep.center_of = sig.center_of;
  rep.objective = kc_hat(r, sig);
  rep.table_source = "estimated";
  rep.seed = r.seed();
  rep.pools = {{"r", r.size()}};
  return rep;
}

namespace detail {

/**
 * Running state for the thresholded coverage potential sum_v min(q, f_v)
 * over an exact table. value() is recomputed from the per-node maxima on
 * every call so repeated feasibility checks cannot drift.
 */
class TableMinQOracle {
 public:
  TableMinQOracle(const ConnectivityTable& t, double q)
      : t_(&t), q_(q), best_(static_cast<std::size_t>(t.node_count()) + 1, 0.0) {}

  double gain(NodeId u) const {
    double g = 0.0;
    for (NodeId v = 1; v <= t_->node_count(); ++v) {
      double fu = std::max(best_[v], (*t_)(u, v));
      g += std::min(q_, fu) - std::min(q_, best_[v]);
    }
    return g;
  }

  void commit(NodeId u) {
    for (NodeId v = 1; v <= t_->node_count(); ++v)
      best_[v] = std::max(best_[v], (*t_)(u, v));
  }

  double value() const {
    double total = 0.0;
    for (NodeId v = 1; v <= t_->node_count(); ++v) total += std::min(q_, best_[v]);
    return total;
  }

 private:
  const ConnectivityTable* t_;
  double q_;
  std::vector<double> best_;
};

/**
 * Same potential over a sample pool. Per-node strengths stay as integer
 * world counts; each term divides by |R| exactly the way l_hat does, so
 * value() equals l_hat(r, q, C) bitwise for the committed set.
 */
class SampleMinQOracle {
 public:
  SampleMinQOracle(const SampleSet& r, double q)
      : r_(&r), q_(q), best_(static_cast<std::size_t>(r.graph().node_count()) + 1, 0) {
    r.require_nonempty();
    if (!(q > 0.0) || q > 1.0) throw DomainError("threshold q must lie in (0, 1]");
  }

  double gain(NodeId u) const {
    double g = 0.0;
    const double worlds = static_cast<double>(r_->size());
    for (NodeId v = 1; v <= r_->graph().node_count(); ++v) {
      std::int64_t c = r_->pair_count(u, v);
      if (c <= best_[v]) continue;
      double fb = static_cast<double>(best_[v]) / worlds;
      double fu = static_cast<double>(c) / worlds;
      g += std::min(q_, fu) - std::min(q_, fb);
    }
    return g;
  }

  void commit(NodeId u) {
    for (NodeId v = 1; v <= r_->graph().node_count(); ++v)
      best_[v] = std::max(best_[v], r_->pair_count(u, v));
  }

  double value() const {
    double total = 0.0;
    for (NodeId v = 1; v <= r_->graph().node_count(); ++v) {
      double f = static_cast<double>(best_[v]) / r_->size();
      total += std::min(q_, f);
    }
    return total;
  }

 private:
  const SampleSet* r_;
  double q_;
  std::vector<std::int64_t> best_;
};

inline int center_budget(int n, double eps1) {
  double b = std::ceil(std::log(static_cast<double>(n) / eps1));
  return static_cast<int>(b);
}

}  // namespace detail

/**
 * Single node maximizing sum_v min(q, f_hat_v({u})), found lazily: mean
 * component sizes are valid upper bounds for the thresholded sums, so most
 * candidates are never evaluated exactly.
 */
inline NodeId first_node_for_threshold(const SampleSet& r, double q) {
  detail::SampleMinQOracle cov(r, q);
  std::uint64_t evals = 0;
  LazyQueue queue = component_sum_queue(r, /*fresh=*/false, evals);
  auto gain = [&cov](NodeId u) { return cov.gain(u); };
  return queue.pop_max(gain, evals).node;
}

/**
 * Bisection on the weakest-link value q with an exact table. A probe at q is
 * feasible when greedy coverage reaches (n - eps1) q within ceil(ln(n/eps1)) k
 * centers; feasible probes raise the certified floor q1, infeasible ones
 * lower the ceiling q2, until q1 >= (1 - eps2) q2. May return more than k
 * centers; that surplus is the price of the approximation.
 */
inline SolveReport solve_kcenter_search(const UncertainGraph& g, int k, double eps1,
                                        double eps2, const ExactOracle& oracle) {
  const int n = g.node_count();
  if (k < 1 || k > n) throw DomainError("k must be between 1 and n");
  detail::check_eps(eps1, "eps1");
  detail::check_eps(eps2, "eps2");
  const ConnectivityTable& t = oracle.table();
  const int budget = detail::center_budget(n, eps1) * k;
  const double floor = g.edge_probability_product();

  double q1 = 0.0, q2 = 1.0;
  std::vector<NodeId> best_centers;
  std::uint64_t rounds = 0;
  std::uint64_t evals = 0;
  bool certified = false;
  while (true) {
    if (q1 >= (1.0 - eps2) * q2) {
      certified = !best_centers.empty();
      break;
    }
    // Positive lower bound on the optimum: the all-edges world alone gives
    // every pair at least the product of all edge probabilities. Falling
    // below it means no probe can ever succeed (disconnected input).
    if (q2 < floor) break;
    ++rounds;
    const double q = (q1 + q2) / 2.0;
    const double threshold = (n - eps1) * q;
    detail::TableMinQOracle cov(t, q);
    std::vector<NodeId> chosen;
    std::vector<char> in(static_cast<std::size_t>(n) + 1, 0);
    while (cov.value() < threshold && static_cast<int>(chosen.size()) < budget) {
      NodeId pick = 0;
      double best_gain = 0.0;
      for (NodeId u = 1; u <= n; ++u) {
        if (in[u]) continue;
        double gn = cov.gain(u);
        ++evals;
        if (pick == 0 || gn > best_gain) {
          pick = u;
          best_gain = gn;
        }
      }
      if (pick == 0 || best_gain <= 0.0) break;
      cov.commit(pick);
      chosen.push_back(pick);
      in[pick] = 1;
    }
    if (cov.value() >= threshold) {
      q1 = q;
      best_centers = std::move(chosen);
    } else {
      q2 = q;
    }
  }
  if (best_centers.empty())
    best_centers = detail::farthest_first<double>(
        n, k, 0.0, [&t](NodeId c, NodeId v) { return t(c, v); });

  SolveReport rep = detail::base_report(g, k, "search", "kc");
  rep.parameters = {{"eps1", eps1}, {"eps2", eps2}};
  ClusteringSignature sig = assign_clusters(t, best_centers);
  rep.centers = sig.centers;
  rep.center_of = sig.center_of;
  rep.objective = kc_value(t, sig);
  rep.table_source = "exact";
  rep.bounds = {{"q1", q1}, {"q2", q2}};
  rep.rounds = rounds;
  rep.evaluations = evals;
  rep.budget = budget;
  rep.certified = certified;
  return rep;
}

struct GuessOptions {
  std::uint64_t max_pool = 1'000'000;
};

/**
 * Guessing loop: try q = 1/2, 1/4, ... as the optimum; at each guess grow the
 * pool to the size its union-bound share requires, run the sampled
 * farthest-first traversal, and accept once every non-self link of the
 * clustering has a fresh-pool lower confidence bound at least q. The
 * validation pool is always disjoint from the selection pool: selection uses
 * the stream prefix, validation the window right after it, and the next round
 * absorbs that window into the prefix.
 */
inline SolveReport solve_kcenter_guess(const UncertainGraph& g, int k, double eps1,
                                       double eps2, double delta, std::uint64_t seed,
                                       GuessOptions opt = {}) {
  const int n = g.node_count();
  if (k < 1 || k > n) throw DomainError("k must be between 1 and n");
  detail::check_eps(eps1, "eps1");
  detail::check_eps(eps2, "eps2");
  if (eps1 + eps2 >= 1.0) throw DomainError("eps1 + eps2 must be below 1");
  detail::check_delta(delta);

  SolveReport rep = detail::base_report(g, k, "guess", "kc");
  rep.seed = seed;
  rep.parameters = {{"eps1", eps1}, {"eps2", eps2}, {"delta", delta}};

  const double pi2 = std::numbers::pi * std::numbers::pi;
  SampleSet r(g, seed);
  std::size_t window = 0;
  for (std::uint64_t i = 1;; ++i) {
    const double q = std::ldexp(1.0, -static_cast<int>(std::min<std::uint64_t>(i, 1024)));
    const double delta_i = 6.0 * delta / (pi2 * static_cast<double>(i) * static_cast<double>(i));
    std::uint64_t need;
    try {
      need = samples_for_kcenter_simple(n, eps1, eps2, delta_i / 2.0, q);
    } catch (const CapError&) {
      need = opt.max_pool + 1;
    }
    const std::uint64_t prefix = std::max<std::uint64_t>(r.size() + window, need);
    if (prefix > opt.max_pool) {
      if (i == 1) throw CapError("guess loop needs more worlds than the configured maximum");
      rep.certified = false;
      rep.rounds = i - 1;
      break;
    }
    r.append(window);
    if (r.size() < prefix) r.append(prefix - r.size());
    SampleSet validation(g, seed, r.size());
    validation.append(r.size());

    auto centers = detail::farthest_first<std::int64_t>(
        n, k, std::int64_t{0},
        [&r](NodeId c, NodeId v) { return r.pair_count(c, v); });
    ClusteringSignature sig = assign_clusters(r.estimate_table(), centers);

    const double theta = static_cast<double>(validation.size());
    double z_min = 1.0;  // no non-self links leaves the certificate vacuously true
    if (n > k) {
      const double a = std::log(2.0 * (n - k) / delta_i);
      const double u6 = a / (6.0 * theta);
      for (NodeId v = 1; v <= n; ++v) {
        if (sig.center_of[v] == v) continue;
        double p = pr_hat(validation, sig.center_of[v], v);
        double z = std::pow(std::sqrt(p) - std::sqrt(u6), 2) - u6;
        z_min = std::min(z_min, std::clamp(z, 0.0, 1.0));
      }
    }

    rep.centers = sig.centers;
    rep.center_of = sig.center_of;
    rep.objective = kc_hat(r, sig);
    rep.table_source = "estimated";
    rep.bounds = {{"q", q}, {"z", z_min}};
    rep.pools = {{"r", r.size()}, {"rprime", validation.size()}};
    if (z_min >= q) {
      rep.certified = true;
      rep.rounds = i;
      break;
    }
    window = validation.size();
  }
  return rep;
}

struct SearchPlusOptions {
  std::uint64_t max_pool = 1'000'000;
};

/**
 * Sampled bisection: like the exact search, but each probe runs against a
 * pool grown to the size its own confidence share demands, tests the relaxed
 * threshold (n - eps1)(1 - eps3) q, and builds centers lazily so most
 * candidate gains are never evaluated. The coverage slacks eps1 = eps2 are
 * derived from the accuracy identity (1-eps)(1+eps3) = (1-eps1)(1-eps2)(1-eps3).
 * The signature is frozen at the probe that last raised q1; its weakest link
 * is re-estimated on the final pool.
 */
inline SolveReport solve_kcenter_search_sampled(const UncertainGraph& g, int k,
                                                double eps, double eps3, double delta,
                                                std::uint64_t seed,
                                                SearchPlusOptions opt = {}) {
  const int n = g.node_count();
  if (k < 1 || k > n) throw DomainError("k must be between 1 and n");
  detail::check_eps(eps, "eps");
  detail::check_eps(eps3, "eps3");
  detail::check_delta(delta);
  const double pair_target = (1.0 - eps) * (1.0 + eps3) / (1.0 - eps3);
  if (pair_target >= 1.0)
    throw DomainError("eps3 is too large for eps: the accuracy identity has no solution");
  const double eps1 = 1.0 - std::sqrt(pair_target);
  const double eps2 = eps1;

  SolveReport rep = detail::base_report(g, k, "search-plus", "kc");
  rep.seed = seed;
  rep.parameters = {
      {"eps", eps}, {"eps1", eps1}, {"eps2", eps2}, {"eps3", eps3}, {"delta", delta}};

  const int budget = detail::center_budget(n, eps1) * k;
  const double floor = g.edge_probability_product();
  const double pi2 = std::numbers::pi * std::numbers::pi;

  SampleSet r(g, seed);
  double q1 = 0.0, q2 = 1.0;
  ClusteringSignature best_sig;
  std::uint64_t rounds = 0;
  std::uint64_t evals = 0;
  bool certified = false;
  while (true) {
    if (q1 >= (1.0 - eps2) * q2) {
      certified = !best_sig.centers.empty();
      break;
    }
    if (q2 < floor) break;
    const std::uint64_t i = ++rounds;
    const double q = (q1 + q2) / 2.0;
    const double delta_i = 6.0 * delta / (pi2 * static_cast<double>(i) * static_cast<double>(i));
    std::uint64_t need;
    try {
      need = samples_for_kcenter_bicriteria(n, k, eps3, eps, delta_i, q);
    } catch (const CapError&) {
      need = opt.max_pool + 1;
    }
    if (need > opt.max_pool) {
      // Round 1 has not drawn a single world yet; there is no best-so-far
      // clustering to fall back on.
      if (i == 1) throw CapError("bisection needs more worlds than the configured maximum");
      break;
    }
    if (r.size() < need) r.append(need - r.size());

    const double qp = (1.0 - eps3) * q;
    const double threshold = (n - eps1) * qp;
    detail::SampleMinQOracle cov(r, qp);
    LazyQueue queue = component_sum_queue(r, /*fresh=*/false, evals);
    auto gain = [&cov](NodeId u) { return cov.gain(u); };
    std::vector<NodeId> chosen;
    while (cov.value() < threshold && static_cast<int>(chosen.size()) < budget &&
           !queue.empty()) {
      LazyQueue::Entry e = queue.pop_max(gain, evals);
      if (e.ub <= 0.0) break;
      cov.commit(e.node);
      chosen.push_back(e.node);
      queue.invalidate();
    }
    if (cov.value() >= threshold) {
      q1 = q;
      best_sig = assign_clusters(r.estimate_table(), chosen);
    } else {
      q2 = q;
    }
  }
  if (best_sig.centers.empty()) {
    auto centers = detail::farthest_first<std::int64_t>(
        n, k, std::int64_t{0},
        [&r](NodeId c, NodeId v) { return r.pair_count(c, v); });
    best_sig = assign_clusters(r.estimate_table(), centers);
  }

  rep.centers = best_sig.centers;
  rep.center_of = best_sig.center_of;
  rep.objective = kc_hat(r, best_sig);
  rep.table_source = "estimated";
  rep.bounds = {{"q1", q1}, {"q2", q2}};
  rep.pools = {{"r", r.size()}};
  rep.rounds = rounds;
  rep.evaluations = evals;
  rep.budget = budget;
  rep.certified = certified;
  return rep;
}

}  // namespace ugclust
