#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ugclust/common.hpp"
#include "ugclust/graph.hpp"
#include "ugclust/signature.hpp"

namespace ugclust {

/**
 * Self-describing result of one solver run. Every field that influenced the
 * computation (parameters, seed, pool sizes) is recorded so the objective
 * can be recomputed independently; serialization has a fixed key order so
 * identical runs produce identical bytes (the duration field is the one
 * value that varies between runs).
 */
struct SolveReport {
  std::string algorithm;
  std::uint64_t graph_fingerprint = 0;
  int n = 0;
  int m = 0;
  int k = 0;
  std::optional<std::uint64_t> seed;
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<NodeId> centers;
  std::vector<NodeId> center_of;  // 1-based; empty if the run produced no clustering
  std::string objective_kind;     // "km" | "kc"
  double objective = 0.0;
  std::string table_source;       // "exact" | "estimated"
  std::optional<double> coverage;  // total best-link mass of the selection
  std::optional<double> exact_objective;
  std::vector<std::pair<std::string, double>> bounds;
  std::vector<std::pair<std::string, std::uint64_t>> pools;
  std::optional<std::uint64_t> rounds;
  std::optional<std::uint64_t> evaluations;
  std::optional<std::uint64_t> budget;
  bool certified = true;
  double duration_ms = 0.0;

  ClusteringSignature signature() const {
    if (center_of.empty()) throw DomainError("report carries no clustering");
    return ClusteringSignature{centers, center_of};
  }
};

namespace detail {

inline SolveReport base_report(const UncertainGraph& g, int k, std::string algorithm,
                               std::string kind) {
  SolveReport r;
  r.algorithm = std::move(algorithm);
  r.graph_fingerprint = g.fingerprint();
  r.n = g.node_count();
  r.m = g.edge_count();
  r.k = k;
  r.objective_kind = std::move(kind);
  return r;
}

}  // namespace detail

inline std::string fingerprint_hex(std::uint64_t fp) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[fp & 0xf];
    fp >>= 4;
  }
  return s;
}

inline nlohmann::ordered_json to_json(const SolveReport& r) {
  nlohmann::ordered_json j;
  j["algorithm"] = r.algorithm;
  j["graph"] = {{"fingerprint", fingerprint_hex(r.graph_fingerprint)},
                {"n", r.n},
                {"m", r.m}};
  j["k"] = r.k;
  if (r.seed) j["seed"] = *r.seed;
  if (!r.parameters.empty()) {
    nlohmann::ordered_json p;
    for (const auto& [key, val] : r.parameters) p[key] = val;
    j["parameters"] = std::move(p);
  }
  j["centers"] = r.centers;
  {
    nlohmann::ordered_json a = nlohmann::ordered_json::object();
    for (std::size_t v = 1; v < r.center_of.size(); ++v)
      a[std::to_string(v)] = r.center_of[v];
    j["assignment"] = std::move(a);
  }
  j["objective"] = {{"kind", r.objective_kind},
                    {"value", r.objective},
                    {"source", r.table_source}};
  if (r.coverage) j["coverage"] = *r.coverage;
  if (r.exact_objective) j["exact_objective"] = *r.exact_objective;
  if (!r.bounds.empty()) {
    nlohmann::ordered_json b;
    for (const auto& [key, val] : r.bounds) b[key] = val;
    j["bounds"] = std::move(b);
  }
  if (!r.pools.empty()) {
    nlohmann::ordered_json p;
    for (const auto& [key, val] : r.pools) p[key] = val;
    j["samples"] = std::move(p);
  }
  if (r.rounds) j["rounds"] = *r.rounds;
  if (r.evaluations) j["evaluations"] = *r.evaluations;
  if (r.budget) j["budget_centers"] = *r.budget;
  j["certified"] = r.certified;
  j["duration_ms"] = r.duration_ms;
  return j;
}

}  // namespace ugclust
