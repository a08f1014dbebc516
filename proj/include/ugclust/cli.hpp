#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ugclust/common.hpp"
#include "ugclust/exact.hpp"
#include "ugclust/generate.hpp"
#include "ugclust/graph.hpp"
#include "ugclust/kcenter.hpp"
#include "ugclust/kmedian.hpp"
#include "ugclust/report.hpp"
#include "ugclust/sampling.hpp"
#include "ugclust/signature.hpp"

namespace ugclust::cli {

namespace detail {

inline int default_cap() {
  if (const char* s = std::getenv("UGCLUST_EXACT_CAP")) {
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end && *end == '\0' && v > 0 && v <= 62) return static_cast<int>(v);
  }
  return ExactOptions{}.max_component_edges;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline UncertainGraph load_graph(const std::string& path) {
  return UncertainGraph::parse(read_file(path));
}

/** Send a finished document to --out or the standard stream. */
inline void emit(const std::string& text, const std::string& out_path,
                 std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw InputError("cannot write file: " + out_path);
  f << text;
}

inline nlohmann::ordered_json graph_json(const UncertainGraph& g) {
  return {{"fingerprint", fingerprint_hex(g.fingerprint())},
          {"n", g.node_count()},
          {"m", g.edge_count()}};
}

inline nlohmann::ordered_json pairs_json(const ConnectivityTable& t) {
  nlohmann::ordered_json p = nlohmann::ordered_json::object();
  for (NodeId u = 1; u <= t.node_count(); ++u)
    for (NodeId v = u + 1; v <= t.node_count(); ++v)
      p[std::to_string(u) + "," + std::to_string(v)] = t(u, v);
  return p;
}

inline std::optional<double> opt_of(double v) {
  if (std::isnan(v)) return std::nullopt;
  return v;
}

}  // namespace detail

/** Everything one solver invocation needs, from flags or a bench config. */
struct SolveParams {
  std::string problem;  // "kmedian" | "kcenter"
  std::string algo;
  int k = 1;
  std::uint64_t seed = 1;
  int cap = detail::default_cap();
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> max_pool;
  std::optional<double> epsilon, delta, eps1, eps2, eps3, opt_lb;
  bool enrich = true;
};

namespace detail {

inline double need(const std::optional<double>& v, const std::string& algo,
                   const char* flag) {
  if (!v) throw Error(ErrorKind::usage, algo + " requires " + flag);
  return *v;
}

inline SolveReport dispatch_kmedian(const UncertainGraph& g, const SolveParams& p) {
  if (p.algo == "oracle-greedy") {
    ExactOracle oracle(g, ExactOptions{p.cap});
    return solve_kmedian_oracle(g, p.k, oracle);
  }
  if (p.algo == "kmd2") {
    ExactOracle oracle(g, ExactOptions{p.cap});
    return solve_kmedian_baseline(g, p.k, oracle);
  }
  if (p.algo == "search" || p.algo == "search-plus") {
    std::uint64_t count;
    std::vector<std::pair<std::string, double>> params;
    if (p.samples) {
      count = *p.samples;
    } else {
      double e = need(p.epsilon, p.algo, "--epsilon (or give --samples)");
      double d = need(p.delta, p.algo, "--delta (or give --samples)");
      count = samples_for_kmedian(g.node_count(), p.k, e, d,
                                  static_cast<double>(p.k) / g.node_count());
      params = {{"epsilon", e}, {"delta", d}};
    }
    if (count == 0) throw DomainError("sample pool must hold at least one world");
    SampleSet r = SampleSet::generate(g, count, p.seed);
    SolveReport rep =
        p.algo == "search" ? search_kmedian(g, p.k, r) : search_kmedian_lazy(g, p.k, r);
    if (!params.empty()) rep.parameters = std::move(params);
    return rep;
  }
  if (p.algo == "adaptive") {
    AdaptiveOptions opt;
    if (p.max_pool) opt.max_pool = *p.max_pool;
    return solve_kmedian_adaptive(g, p.k, need(p.epsilon, p.algo, "--epsilon"),
                                  need(p.delta, p.algo, "--delta"), p.seed, opt);
  }
  throw Error(ErrorKind::usage, "unknown k-median algorithm: " + p.algo);
}

inline SolveReport dispatch_kcenter(const UncertainGraph& g, const SolveParams& p) {
  if (p.algo == "gonzalez") {
    ExactOracle oracle(g, ExactOptions{p.cap});
    return solve_kcenter_gonzalez(g, p.k, oracle);
  }
  if (p.algo == "search") {
    ExactOracle oracle(g, ExactOptions{p.cap});
    return solve_kcenter_search(g, p.k, need(p.eps1, p.algo, "--eps1"),
                                need(p.eps2, p.algo, "--eps2"), oracle);
  }
  if (p.algo == "gonzalez-sampled") {
    std::uint64_t count;
    std::vector<std::pair<std::string, double>> params;
    if (p.samples) {
      count = *p.samples;
    } else {
      double e1 = need(p.eps1, p.algo, "--eps1 (or give --samples)");
      double e2 = need(p.eps2, p.algo, "--eps2 (or give --samples)");
      double d = need(p.delta, p.algo, "--delta (or give --samples)");
      double lb = need(p.opt_lb, p.algo, "--opt-lb (or give --samples)");
      count = samples_for_kcenter_simple(g.node_count(), e1, e2, d, lb);
      params = {{"eps1", e1}, {"eps2", e2}, {"delta", d}, {"opt_lb", lb}};
    }
    if (count == 0) throw DomainError("sample pool must hold at least one world");
    SampleSet r = SampleSet::generate(g, count, p.seed);
    SolveReport rep = solve_kcenter_gonzalez_sampled(g, p.k, r);
    if (!params.empty()) rep.parameters = std::move(params);
    return rep;
  }
  if (p.algo == "guess") {
    GuessOptions opt;
    if (p.max_pool) opt.max_pool = *p.max_pool;
    return solve_kcenter_guess(g, p.k, need(p.eps1, p.algo, "--eps1"),
                               need(p.eps2, p.algo, "--eps2"),
                               need(p.delta, p.algo, "--delta"), p.seed, opt);
  }
  if (p.algo == "search-plus") {
    SearchPlusOptions opt;
    if (p.max_pool) opt.max_pool = *p.max_pool;
    return solve_kcenter_search_sampled(g, p.k, need(p.epsilon, p.algo, "--eps"),
                                        need(p.eps3, p.algo, "--eps3"),
                                        need(p.delta, p.algo, "--delta"), p.seed, opt);
  }
  throw Error(ErrorKind::usage, "unknown k-center algorithm: " + p.algo);
}

/** Recompute the report's objective on the exact table when that is affordable. */
inline void enrich_exact(const UncertainGraph& g, SolveReport& rep, int cap) {
  if (rep.table_source != "estimated" || rep.center_of.empty()) return;
  try {
    ExactOracle oracle(g, ExactOptions{cap});
    const ConnectivityTable& t = oracle.table();
    rep.exact_objective = rep.objective_kind == "km" ? km_value(t, rep.signature())
                                                     : kc_value(t, rep.signature());
  } catch (const CapError&) {
    // graph too large to enumerate; the estimate stands alone
  }
}

}  // namespace detail

inline SolveReport run_solve(const UncertainGraph& g, const SolveParams& p) {
  auto t0 = std::chrono::steady_clock::now();
  SolveReport rep = p.problem == "kmedian" ? detail::dispatch_kmedian(g, p)
                                           : detail::dispatch_kcenter(g, p);
  rep.duration_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  if (p.enrich) detail::enrich_exact(g, rep, p.cap);
  return rep;
}

namespace detail {

inline UncertainGraph graph_from_spec(const nlohmann::ordered_json& spec) {
  auto model = spec.at("model").get<std::string>();
  if (model == "path") return path_graph(spec.at("n").get<int>(), spec.at("p").get<double>());
  if (model == "cycle")
    return cycle_graph(spec.at("n").get<int>(), spec.at("p").get<double>());
  if (model == "grid")
    return grid_graph(spec.at("rows").get<int>(), spec.at("cols").get<int>(),
                      spec.at("p").get<double>());
  if (model == "erdos-renyi-probabilistic")
    return random_graph(spec.at("n").get<int>(), spec.at("density").get<double>(),
                        spec.at("pmin").get<double>(), spec.at("pmax").get<double>(),
                        spec.value("seed", std::uint64_t{1}));
  throw InputError("unknown graph model: " + model);
}

inline SolveParams params_from_spec(const nlohmann::ordered_json& spec, int k,
                                    std::uint64_t seed, int cap) {
  SolveParams p;
  p.problem = spec.at("problem").get<std::string>();
  if (p.problem != "kmedian" && p.problem != "kcenter")
    throw InputError("bench problem must be kmedian or kcenter");
  p.algo = spec.at("algo").get<std::string>();
  p.k = k;
  p.seed = seed;
  p.cap = cap;
  if (spec.contains("samples")) p.samples = spec.at("samples").get<std::uint64_t>();
  if (spec.contains("max_pool")) p.max_pool = spec.at("max_pool").get<std::uint64_t>();
  auto grab = [&spec](const char* key) -> std::optional<double> {
    if (spec.contains(key)) return spec.at(key).get<double>();
    return std::nullopt;
  };
  p.epsilon = grab("epsilon");
  p.delta = grab("delta");
  p.eps1 = grab("eps1");
  p.eps2 = grab("eps2");
  p.eps3 = grab("eps3");
  p.opt_lb = grab("opt_lb");
  if (spec.contains("enrich")) p.enrich = spec.at("enrich").get<bool>();
  return p;
}

inline void run_bench(const std::string& config_path, const std::string& out_path,
                      std::ostream& out, int cap) {
  nlohmann::ordered_json cfg;
  try {
    cfg = nlohmann::ordered_json::parse(read_file(config_path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bench config is not valid JSON: ") + e.what());
  }
  std::ostringstream lines;
  try {
    for (const auto& gspec : cfg.at("graphs")) {
      UncertainGraph g = graph_from_spec(gspec);
      for (const auto& kj : cfg.at("k")) {
        int k = kj.get<int>();
        for (const auto& aspec : cfg.at("algorithms")) {
          for (const auto& sj : cfg.at("seeds")) {
            std::uint64_t seed = sj.get<std::uint64_t>();
            SolveParams p = params_from_spec(aspec, k, seed, cap);
            SolveReport rep = run_solve(g, p);
            nlohmann::ordered_json record;
            record["graph"] = gspec;
            record["graph"]["fingerprint"] = fingerprint_hex(g.fingerprint());
            record["k"] = k;
            record["seed"] = seed;
            record["report"] = to_json(rep);
            lines << record.dump() << '\n';
          }
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bench config is malformed: ") + e.what());
  }
  emit(lines.str(), out_path, out);
}

inline const char* kind_name(int code) {
  switch (code) {
    case 2: return "usage";
    case 3: return "input";
    case 4: return "domain";
    case 5: return "cap";
    default: return "internal";
  }
}

inline int fail(std::ostream& err, int code, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = {{"code", code}, {"kind", kind_name(code)}, {"message", message}};
  err << j.dump(2) << '\n';
  return code;
}

}  // namespace detail

/**
 * The whole command-line surface, stream-parameterized so tests can drive it
 * in-process. args excludes the program name. Returns the process exit code:
 * 0 success, 2 usage, 3 input, 4 parameter domain, 5 enumeration cap.
 */
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"approximate k-median and k-center clustering of uncertain graphs"};
  app.require_subcommand(1);
  constexpr double unset = std::numeric_limits<double>::quiet_NaN();

  std::string graph_path, out_path, cache_path, load_path, config_path;
  int cap = detail::default_cap();

  auto* sc_exact = app.add_subcommand("exact", "print the exact connectivity table");
  sc_exact->add_option("graph", graph_path, "edge list file")->required();
  sc_exact->add_option("--cap", cap, "largest per-component edge count to enumerate");
  sc_exact->add_option("--out", out_path, "write the document to this file");

  std::uint64_t samples = 0, seed = 1;
  auto* sc_sample = app.add_subcommand("sample", "estimate the table from sampled worlds");
  sc_sample->add_option("graph", graph_path, "edge list file")->required();
  sc_sample->add_option("--samples", samples, "number of worlds to draw");
  sc_sample->add_option("--seed", seed, "stream seed");
  sc_sample->add_option("--cache", cache_path, "write the drawn worlds here");
  sc_sample->add_option("--load", load_path, "reuse worlds from this cache file");
  sc_sample->add_option("--out", out_path, "write the document to this file");

  SolveParams sp;
  double f_epsilon = unset, f_delta = unset, f_eps1 = unset, f_eps2 = unset,
         f_eps3 = unset, f_opt_lb = unset;
  std::uint64_t f_samples = 0, f_max_pool = 0;
  bool no_exact = false;
  auto add_solve_flags = [&](CLI::App* sc, bool kmedian) {
    sc->add_option("graph", graph_path, "edge list file")->required();
    sc->add_option("--k", sp.k, "number of clusters")->required();
    sc->add_option("--seed", sp.seed, "stream seed for sampled algorithms");
    sc->add_option("--cap", cap, "exact-table edge cap (oracle algorithms)");
    sc->add_option("--samples", f_samples, "fixed sample pool size");
    sc->add_option("--delta", f_delta, "confidence parameter");
    sc->add_option("--max-pool", f_max_pool, "upper limit on adaptive pool growth");
    sc->add_option("--out", out_path, "write the report to this file");
    sc->add_flag("--no-exact-check", no_exact,
                 "skip re-scoring the result on the exact table");
    if (kmedian) {
      sc->add_option("--epsilon", f_epsilon, "accuracy parameter");
    } else {
      sc->add_option("--eps", f_epsilon, "overall accuracy (search-plus)");
      sc->add_option("--eps1", f_eps1, "coverage slack");
      sc->add_option("--eps2", f_eps2, "bisection gap");
      sc->add_option("--eps3", f_eps3, "sampling slack (search-plus)");
      sc->add_option("--opt-lb", f_opt_lb, "optimum lower bound for pool sizing");
    }
  };

  auto* sc_km = app.add_subcommand("solve-kmedian", "mean-link clustering");
  sc_km->add_option("--algo", sp.algo, "algorithm")
      ->required()
      ->check(CLI::IsMember({"oracle-greedy", "kmd2", "search", "search-plus", "adaptive"}));
  add_solve_flags(sc_km, true);

  auto* sc_kc = app.add_subcommand("solve-kcenter", "weakest-link clustering");
  sc_kc->add_option("--algo", sp.algo, "algorithm")
      ->required()
      ->check(CLI::IsMember({"gonzalez", "search", "gonzalez-sampled", "guess", "search-plus"}));
  add_solve_flags(sc_kc, false);

  std::string model;
  int gen_n = 0, gen_rows = 0, gen_cols = 0;
  double gen_p = 0.5, gen_density = 0.3, gen_pmin = 0.1, gen_pmax = 0.9;
  std::uint64_t gen_seed = 1;
  auto* sc_gen = app.add_subcommand("gen", "emit a synthetic graph as an edge list");
  sc_gen->add_option("--model", model, "graph family")
      ->required()
      ->check(CLI::IsMember({"path", "cycle", "grid", "erdos-renyi-probabilistic"}));
  sc_gen->add_option("--n", gen_n, "node count (path, cycle, erdos-renyi)");
  sc_gen->add_option("--p", gen_p, "edge probability (path, cycle, grid)");
  sc_gen->add_option("--rows", gen_rows, "grid rows");
  sc_gen->add_option("--cols", gen_cols, "grid columns");
  sc_gen->add_option("--density", gen_density, "edge density (erdos-renyi)");
  sc_gen->add_option("--pmin", gen_pmin, "probability range low end (erdos-renyi)");
  sc_gen->add_option("--pmax", gen_pmax, "probability range high end (erdos-renyi)");
  sc_gen->add_option("--seed", gen_seed, "generator seed (erdos-renyi)");
  sc_gen->add_option("--out", out_path, "write the edge list to this file");

  auto* sc_bench = app.add_subcommand("bench", "run a matrix of solves as JSON lines");
  sc_bench->add_option("config", config_path, "JSON file declaring the matrix")->required();
  sc_bench->add_option("--cap", cap, "exact-table edge cap for every cell");
  sc_bench->add_option("--out", out_path, "write the records to this file");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));

    if (*sc_exact) {
      UncertainGraph g = detail::load_graph(graph_path);
      ExactOracle oracle(g, ExactOptions{cap});
      nlohmann::ordered_json doc;
      doc["graph"] = detail::graph_json(g);
      doc["source"] = "exact";
      doc["cap"] = cap;
      doc["pairs"] = detail::pairs_json(oracle.table());
      detail::emit(doc.dump(2) + "\n", out_path, out);
    } else if (*sc_sample) {
      UncertainGraph g = detail::load_graph(graph_path);
      std::optional<SampleSet> r;
      if (!load_path.empty()) {
        r = read_sample_cache(load_path, g);
      } else {
        if (samples == 0)
          throw Error(ErrorKind::usage, "provide --samples N or --load FILE");
        r = SampleSet::generate(g, samples, seed);
      }
      if (!cache_path.empty()) write_sample_cache(cache_path, *r);
      nlohmann::ordered_json doc;
      doc["graph"] = detail::graph_json(g);
      doc["source"] = "estimated";
      doc["seed"] = r->seed();
      doc["start"] = r->start_index();
      doc["worlds"] = r->size();
      doc["pairs"] = detail::pairs_json(r->estimate_table());
      detail::emit(doc.dump(2) + "\n", out_path, out);
    } else if (*sc_km || *sc_kc) {
      sp.problem = *sc_km ? "kmedian" : "kcenter";
      sp.cap = cap;
      sp.enrich = !no_exact;
      if (f_samples > 0) sp.samples = f_samples;
      if (f_max_pool > 0) sp.max_pool = f_max_pool;
      sp.epsilon = detail::opt_of(f_epsilon);
      sp.delta = detail::opt_of(f_delta);
      sp.eps1 = detail::opt_of(f_eps1);
      sp.eps2 = detail::opt_of(f_eps2);
      sp.eps3 = detail::opt_of(f_eps3);
      sp.opt_lb = detail::opt_of(f_opt_lb);
      UncertainGraph g = detail::load_graph(graph_path);
      SolveReport rep = run_solve(g, sp);
      detail::emit(to_json(rep).dump(2) + "\n", out_path, out);
    } else if (*sc_gen) {
      UncertainGraph g = [&] {
        if (model == "path") return path_graph(gen_n, gen_p);
        if (model == "cycle") return cycle_graph(gen_n, gen_p);
        if (model == "grid") return grid_graph(gen_rows, gen_cols, gen_p);
        return random_graph(gen_n, gen_density, gen_pmin, gen_pmax, gen_seed);
      }();
      detail::emit(g.to_edge_list(), out_path, out);
    } else if (*sc_bench) {
      detail::run_bench(config_path, out_path, out, cap);
    }
    return 0;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    return detail::fail(err, 2, e.what());
  } catch (const Error& e) {
    return detail::fail(err, e.exit_code(), e.what());
  } catch (const std::exception& e) {
    return detail::fail(err, 1, e.what());
  }
}

}  // namespace ugclust::cli
