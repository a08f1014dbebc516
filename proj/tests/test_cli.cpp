#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <ugclust/cli.hpp>

#include "helpers.hpp"

using namespace ugclust;
using nlohmann::ordered_json;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliResult res;
  res.code = cli::run(std::move(args), out, err);
  res.out = out.str();
  res.err = err.str();
  return res;
}

std::string write_fixture(const std::string& name, const std::string& content) {
  auto p = std::filesystem::temp_directory_path() / ("ugclust_test_" + name);
  std::ofstream f(p, std::ios::binary);
  f << content;
  return p.string();
}

std::string g2_file() { return write_fixture("g2.el", helpers::g2().to_edge_list()); }

std::string strip_duration(const std::string& s) {
  std::istringstream in(s);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line))
    if (line.find("\"duration_ms\"") == std::string::npos) out << line << '\n';
  return out.str();
}

}  // namespace

TEST_CASE("exact subcommand prints the pair table") {
  auto path = write_fixture("g1.el", helpers::g1().to_edge_list());
  auto res = run_cli({"exact", path});
  REQUIRE(res.code == 0);
  auto doc = ordered_json::parse(res.out);
  CHECK(doc["graph"]["n"] == 2);
  CHECK(doc["graph"]["m"] == 1);
  CHECK(doc["source"] == "exact");
  CHECK(doc["pairs"]["1,2"] == 0.5);
}

TEST_CASE("mean-link solve matches the documented example") {
  auto res = run_cli({"solve-kmedian", "--algo", "oracle-greedy", "--k", "1", g2_file()});
  REQUIRE(res.code == 0);
  auto j = ordered_json::parse(res.out);
  CHECK(j["algorithm"] == "oracle-greedy");
  CHECK(j["centers"] == ordered_json::array({2}));
  CHECK(j["objective"]["kind"] == "km");
  CHECK(j["objective"]["value"].get<double>() == 2.0 / 3.0);
  CHECK(j["objective"]["source"] == "exact");
  CHECK(j["coverage"].get<double>() == 2.0);
  CHECK(j["assignment"] == ordered_json({{"1", 2}, {"2", 2}, {"3", 2}}));
  CHECK(j["certified"] == true);
}

TEST_CASE("weakest-link solve matches the documented example") {
  auto res = run_cli(
      {"solve-kcenter", "--algo", "gonzalez", "--k", "2", "--seed", "7", g2_file()});
  REQUIRE(res.code == 0);
  auto j = ordered_json::parse(res.out);
  CHECK(j["centers"] == ordered_json::array({1, 3}));
  CHECK(j["objective"]["kind"] == "kc");
  CHECK(j["objective"]["value"].get<double>() == 0.5);
}

TEST_CASE("baseline report carries its certificate bounds") {
  auto res = run_cli({"solve-kmedian", "--algo", "kmd2", "--k", "1", g2_file()});
  REQUIRE(res.code == 0);
  auto j = ordered_json::parse(res.out);
  CHECK(j["bounds"]["lb"].get<double>() == j["objective"]["value"].get<double>());
  CHECK(j["bounds"]["ub"].get<double>() == j["objective"]["value"].get<double>());
}

TEST_CASE("sampled solves are reproducible byte for byte") {
  std::vector<std::string> args{"solve-kmedian", "--algo",    "search", "--k", "1",
                                "--samples",     "100",       "--seed", "9",   g2_file()};
  auto a = run_cli(args);
  auto b = run_cli(args);
  REQUIRE(a.code == 0);
  CHECK(strip_duration(a.out) == strip_duration(b.out));
  auto j = ordered_json::parse(a.out);
  CHECK(j["seed"] == 9);
  CHECK(j["samples"]["r"] == 100);
  CHECK(j["objective"]["source"] == "estimated");
  CHECK(j.contains("exact_objective"));  // small graph: re-scored on the exact table

  auto c = run_cli({"solve-kmedian", "--algo", "search", "--k", "1", "--samples", "100",
                    "--seed", "10", g2_file()});
  CHECK(strip_duration(a.out) != strip_duration(c.out));  // seed is load-bearing
}

TEST_CASE("estimated reports can be recomputed from their own fields") {
  auto res = run_cli({"solve-kcenter", "--algo", "gonzalez-sampled", "--k", "2",
                      "--samples", "300", "--seed", "12", g2_file()});
  REQUIRE(res.code == 0);
  auto j = ordered_json::parse(res.out);
  auto g = helpers::g2();
  CHECK(j["graph"]["fingerprint"] == fingerprint_hex(g.fingerprint()));

  SampleSet r = SampleSet::generate(g, j["samples"]["r"].get<std::uint64_t>(),
                                    j["seed"].get<std::uint64_t>());
  ClusteringSignature sig;
  sig.centers = j["centers"].get<std::vector<NodeId>>();
  sig.center_of.assign(static_cast<std::size_t>(g.node_count()) + 1, 0);
  for (NodeId v = 1; v <= g.node_count(); ++v)
    sig.center_of[v] = j["assignment"][std::to_string(v)].get<NodeId>();
  CHECK(kc_hat(r, sig) == j["objective"]["value"].get<double>());

  ExactOracle oracle(g);
  CHECK(kc_value(oracle.table(), sig) == j["exact_objective"].get<double>());
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"solve-kmedian", "--algo", "kmd2", g2_file()}).code == 2);  // no --k
  CHECK(run_cli({"solve-kmedian", "--algo", "bogus", "--k", "1", g2_file()}).code == 2);
  auto res = run_cli({"solve-kmedian", "--algo", "adaptive", "--k", "1", "--delta", "0.2",
                      g2_file()});
  CHECK(res.code == 2);
  auto err = ordered_json::parse(res.err);
  CHECK(err["error"]["kind"] == "usage");
  CHECK(err["error"]["code"] == 2);
}

TEST_CASE("input errors exit with code 3") {
  auto res = run_cli({"exact", "/nonexistent/nowhere.el"});
  CHECK(res.code == 3);
  CHECK(ordered_json::parse(res.err)["error"]["kind"] == "input");
  auto bad = write_fixture("bad.el", "not an edge list\n");
  CHECK(run_cli({"exact", bad}).code == 3);
}

TEST_CASE("domain errors exit with code 4") {
  auto res = run_cli({"solve-kmedian", "--algo", "oracle-greedy", "--k", "0", g2_file()});
  CHECK(res.code == 4);
  CHECK(ordered_json::parse(res.err)["error"]["kind"] == "domain");
}

TEST_CASE("enumeration cap exits with code 5") {
  auto path6 = write_fixture("p6.el", path_graph(6, 0.5).to_edge_list());
  auto res = run_cli({"exact", "--cap", "3", path6});
  CHECK(res.code == 5);
  CHECK(ordered_json::parse(res.err)["error"]["kind"] == "cap");

  // The environment default applies when no --cap is given.
  ::setenv("UGCLUST_EXACT_CAP", "3", 1);
  CHECK(run_cli({"exact", path6}).code == 5);
  ::unsetenv("UGCLUST_EXACT_CAP");
  CHECK(run_cli({"exact", path6}).code == 0);
}

TEST_CASE("generator subcommand") {
  auto res = run_cli({"gen", "--model", "path", "--n", "3", "--p", "0.5"});
  REQUIRE(res.code == 0);
  CHECK(res.out == helpers::g2().to_edge_list());

  auto grid = run_cli({"gen", "--model", "grid", "--rows", "2", "--cols", "2", "--p", "1"});
  CHECK(grid.out == "4 4\n1 2 1\n1 3 1\n2 4 1\n3 4 1\n");

  std::vector<std::string> er{"gen",       "--model", "erdos-renyi-probabilistic",
                              "--n",       "12",      "--density",
                              "0.4",       "--seed",  "5"};
  auto e1 = run_cli(er);
  auto e2 = run_cli(er);
  CHECK(e1.out == e2.out);
  CHECK(UncertainGraph::parse(e1.out).node_count() == 12);

  auto out_path = std::filesystem::temp_directory_path() / "ugclust_test_gen.el";
  std::vector<std::string> to_file = er;
  to_file.push_back("--out");
  to_file.push_back(out_path.string());
  auto e3 = run_cli(to_file);
  REQUIRE(e3.code == 0);
  CHECK(e3.out.empty());
  std::ifstream in(out_path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == e1.out);

  CHECK(run_cli({"gen", "--model", "path", "--n", "0"}).code == 4);
}

TEST_CASE("sample subcommand with a world cache") {
  auto cache = (std::filesystem::temp_directory_path() / "ugclust_test_worlds.bin").string();
  auto fresh = run_cli({"sample", "--samples", "50", "--seed", "3", "--cache", cache,
                        g2_file()});
  REQUIRE(fresh.code == 0);
  auto loaded = run_cli({"sample", "--load", cache, g2_file()});
  REQUIRE(loaded.code == 0);
  CHECK(fresh.out == loaded.out);
  auto doc = ordered_json::parse(fresh.out);
  CHECK(doc["worlds"] == 50);
  CHECK(doc["seed"] == 3);
  CHECK(doc["source"] == "estimated");

  CHECK(run_cli({"sample", g2_file()}).code == 2);  // neither --samples nor --load

  auto other = write_fixture("g3.el", helpers::g3().to_edge_list());
  CHECK(run_cli({"sample", "--load", cache, other}).code == 3);
}

TEST_CASE("bench runs the whole matrix as JSON lines") {
  ordered_json cfg = {
      {"graphs", {{{"model", "path"}, {"n", 3}, {"p", 0.5}}}},
      {"k", {1, 2}},
      {"algorithms", {{{"problem", "kmedian"}, {"algo", "oracle-greedy"}}}},
      {"seeds", {1, 2}},
  };
  auto cfg_path = write_fixture("bench.json", cfg.dump());
  auto res = run_cli({"bench", cfg_path});
  REQUIRE(res.code == 0);

  std::vector<std::string> lines;
  std::istringstream in(res.out);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  REQUIRE(lines.size() == 4);  // 1 graph x 2 k x 1 algorithm x 2 seeds

  auto first = ordered_json::parse(lines[0]);
  CHECK(first["graph"]["model"] == "path");
  CHECK(first["graph"].contains("fingerprint"));
  CHECK(first["k"] == 1);
  CHECK(first["seed"] == 1);
  CHECK(first["report"]["algorithm"] == "oracle-greedy");
  CHECK(ordered_json::parse(lines[3])["k"] == 2);

  auto again = run_cli({"bench", cfg_path});
  std::regex dur("\"duration_ms\":[^,}]+");
  CHECK(std::regex_replace(res.out, dur, "") == std::regex_replace(again.out, dur, ""));

  auto broken = write_fixture("bench_bad.json", "{ nope");
  CHECK(run_cli({"bench", broken}).code == 3);
  auto incomplete = write_fixture("bench_inc.json", R"({"k": [1]})");  // no graphs key
  CHECK(run_cli({"bench", incomplete}).code == 3);
}

TEST_CASE("help is printed on request") {
  auto res = run_cli({"--help"});
  CHECK(res.code == 0);
  CHECK(res.out.find("solve-kmedian") != std::string::npos);
}
