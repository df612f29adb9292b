#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "test_util.hpp"

using namespace repath;
using namespace repath::testutil;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const char* bin = std::getenv("REPATH_BIN");
  REQUIRE(bin != nullptr);
  std::string cmd = std::string(bin) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::string g0_args() {
  return "--edges " + data_file("g0_edges.tsv") + " --labels " + data_file("g0_labels.tsv");
}

}  // namespace

TEST_CASE("query subcommand on g0") {
  auto central = run_cli("query " + g0_args() + " --query 'a(be|(cd)^+f)g' --engine central");
  CHECK(central.exit_code == 0);
  CHECK(central.out == "a1\tg1\na1\tg2\na1\tg3\n");

  auto dist = run_cli("query " + g0_args() + " --partitions 4 --query 'a(be|(cd)^+f)g' --engine dist");
  CHECK(dist.out == central.out);

  auto oracle = run_cli("query " + g0_args() + " --query 'a(be|(cd)^+f)g' --engine oracle");
  CHECK(oracle.out == central.out);

  auto count = run_cli("query " + g0_args() + " --query 'a(be|(cd)^+f)g' --count-only");
  CHECK(count.out == "3\n");
}

TEST_CASE("malformed query exits with code 2") {
  auto res = run_cli("query " + g0_args() + " --query 'a||b'");
  CHECK(res.exit_code == 2);
  CHECK(res.out.find("SyntaxError") != std::string::npos);
}

TEST_CASE("explain prints a stable plan") {
  auto a = run_cli("explain " + g0_args() + " --query 'a(be|(cd)^+f)g' --no-opt");
  auto b = run_cli("explain " + g0_args() + " --query 'a(be|(cd)^+f)g' --no-opt");
  CHECK(a.out == b.out);
  CHECK(a.out.find("Load({a@0}) dir=>") == 0);
  CHECK(a.out.find("ClosureLink({c@3}, {d@4}) dir=>") != std::string::npos);

  auto costs = run_cli("explain " + g0_args() + " --query 'abc' --costs");
  CHECK(costs.out.find("cost=") != std::string::npos);
  CHECK(costs.out.find("total") != std::string::npos);
}

TEST_CASE("ingest and stats subcommands") {
  auto ing = run_cli("ingest " + g0_args());
  CHECK(ing.out.find("vertices\t15") != std::string::npos);
  CHECK(ing.out.find("edges\t17") != std::string::npos);

  auto stats = run_cli("stats " + g0_args());
  CHECK(stats.out.find("num,c,3") != std::string::npos);
  CHECK(stats.out.find("pro_out,c,d,1") != std::string::npos);

  auto pruned = run_cli("stats " + g0_args() + " --eps-p 2.0");
  CHECK(pruned.out.find("pro_out") == std::string::npos);
}

TEST_CASE("gen-rmat round trips through ingest") {
  std::string edges = "/tmp/repath_rmat_edges.tsv", labels = "/tmp/repath_rmat_labels.tsv";
  auto gen = run_cli("gen-rmat --nodes 64 --avg-degree 2 --num-labels 3 --seed 9 --out-edges " +
                     edges + " --out-labels " + labels);
  CHECK(gen.exit_code == 0);
  CHECK(gen.out.find("edges\t128") != std::string::npos);
  auto ing = run_cli("ingest --edges " + edges + " --labels " + labels);
  CHECK(ing.out.find("vertices\t64") != std::string::npos);
  CHECK(ing.out.find("edges\t128") != std::string::npos);

  auto gen2 = run_cli("gen-rmat --nodes 64 --avg-degree 2 --num-labels 3 --seed 9 --out-edges " +
                      edges + ".2 --out-labels " + labels + ".2");
  auto ing2 = run_cli("ingest --edges " + edges + ".2 --labels " + labels + ".2");
  CHECK(ing.out == ing2.out);
}

TEST_CASE("gen-queries bfs yields nonempty oracle results") {
  auto res = run_cli("gen-queries " + g0_args() + " --kind bfs --length 5 --count 5 --seed 3");
  CHECK(res.exit_code == 0);
  LabeledGraph g = load_g0();
  std::istringstream in(res.out);
  std::string q;
  int checked = 0;
  while (std::getline(in, q)) {
    if (q.empty()) continue;
    CHECK(!match_pairs_bruteforce(g, parse(q)).empty());
    ++checked;
  }
  CHECK(checked == 5);
}

TEST_CASE("gen-queries random with zero operator rate is a pure concatenation") {
  auto res = run_cli("gen-queries " + g0_args() +
                     " --kind random --length 6 --count 3 --seed 4 --op-rate 0 --wildcard-rate 0");
  std::istringstream in(res.out);
  std::string q;
  while (std::getline(in, q)) {
    if (q.empty()) continue;
    CHECK(q.size() == 6);
    CHECK(q.find('(') == std::string::npos);
    CHECK(q.find('+') == std::string::npos);
  }
}

TEST_CASE("bench emits the tab-separated report") {
  std::string qf = "/tmp/repath_bench_queries.txt";
  {
    std::ofstream f(qf);
    f << "a(be|(cd)^+f)g\n";
  }
  auto res = run_cli("bench " + g0_args() + " --queries-file " + qf + " --reps 1");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("query\tengine\tpartitions\ttime_ms\tvisits\n") == 0);
  // single query, single row
  CHECK(std::count(res.out.begin(), res.out.end(), '\n') == 2);

  auto cmp = run_cli("bench " + g0_args() + " --queries-file " + qf +
                     " --reps 1 --opt-compare --seed 5");
  std::istringstream in(cmp.out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "query\tengine\tpartitions\ttime_ms\tvisits\tOp\tMax\tMin\tAvg");
}

TEST_CASE("query message log dump") {
  std::string log = "/tmp/repath_msglog.csv";
  auto res = run_cli("query " + g0_args() + " --partitions 3 --query 'a(cd)+' --engine dist" +
                     " --message-log " + log);
  CHECK(res.exit_code == 0);
  std::ifstream f(log);
  std::string line;
  std::getline(f, line);
  CHECK(line == "round,src,dst,primitive,records");
}
