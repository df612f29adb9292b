#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "repath/queries.hpp"

using namespace repath;

namespace {

struct GraphArgs {
  std::string edges, labels;
  std::uint32_t partitions = 1;
  std::uint64_t partition_seed = 0;
};

void add_graph_args(CLI::App* cmd, GraphArgs& g) {
  cmd->add_option("--edges", g.edges, "edge file: src<TAB>dst per line")->required();
  cmd->add_option("--labels", g.labels, "label file: vertex<TAB>label per line")->required();
  cmd->add_option("--partitions", g.partitions, "number of simulated machines");
  cmd->add_option("--partition-seed", g.partition_seed, "seed for the placement hash");
}

LabeledGraph load_graph(const GraphArgs& g) {
  return ingest_files(g.edges, g.labels, g.partitions, g.partition_seed);
}

Engine parse_engine(const std::string& name) {
  if (name == "central") return Engine::Central;
  if (name == "dist") return Engine::Dist;
  if (name == "oracle") return Engine::Oracle;
  throw CLI::ValidationError("--engine must be central, dist or oracle");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"repath: regular-expression path queries over vertex-labeled graphs"};
  app.require_subcommand(1);

  // ingest
  GraphArgs ingest_args;
  auto* cmd_ingest = app.add_subcommand("ingest", "load a graph and print its summary");
  add_graph_args(cmd_ingest, ingest_args);

  // gen-rmat
  struct {
    std::uint64_t nodes = 1024;
    double avg_degree = 4;
    int labels = 8;
    std::uint64_t seed = 0;
    std::string out_edges, out_labels;
  } rmat;
  auto* cmd_rmat = app.add_subcommand("gen-rmat", "generate an RMAT graph as fixture files");
  cmd_rmat->add_option("--nodes", rmat.nodes)->required();
  cmd_rmat->add_option("--avg-degree", rmat.avg_degree);
  cmd_rmat->add_option("--num-labels", rmat.labels);
  cmd_rmat->add_option("--seed", rmat.seed);
  cmd_rmat->add_option("--out-edges", rmat.out_edges)->required();
  cmd_rmat->add_option("--out-labels", rmat.out_labels)->required();

  // stats
  GraphArgs stats_args;
  StatsOptions stats_opt;
  std::string stats_out;
  auto* cmd_stats = app.add_subcommand("stats", "collect and print the label statistics");
  add_graph_args(cmd_stats, stats_args);
  cmd_stats->add_option("--eps-p", stats_opt.eps_p, "Pro pruning threshold");
  cmd_stats->add_option("--eps-t", stats_opt.eps_t, "TNeighbor pruning threshold");
  cmd_stats->add_option("--out", stats_out, "write the table to a file instead of stdout");

  // explain
  GraphArgs explain_args;
  std::string explain_query;
  bool explain_costs = false, explain_no_opt = false;
  auto* cmd_explain = app.add_subcommand("explain", "print the physical plan for a query");
  add_graph_args(cmd_explain, explain_args);
  cmd_explain->add_option("--query", explain_query)->required();
  cmd_explain->add_flag("--costs", explain_costs, "include per-operator estimated costs");
  cmd_explain->add_flag("--no-opt", explain_no_opt, "left-to-right default plan");

  // query
  GraphArgs query_args;
  std::string query_text, engine_name = "central", message_log_path;
  bool count_only = false, no_opt = false, with_explain = false;
  auto* cmd_query = app.add_subcommand("query", "evaluate a query and print the result pairs");
  add_graph_args(cmd_query, query_args);
  cmd_query->add_option("--query", query_text)->required();
  cmd_query->add_option("--engine", engine_name, "central | dist | oracle");
  cmd_query->add_flag("--count-only", count_only);
  cmd_query->add_flag("--no-opt", no_opt);
  cmd_query->add_flag("--explain", with_explain, "print the plan before the results");
  cmd_query->add_option("--message-log", message_log_path, "dist: dump the message log CSV");

  // gen-queries
  GraphArgs gen_args;
  std::string gen_kind = "random", hand_file;
  QueryGenSpec gen_spec;
  auto* cmd_gen = app.add_subcommand("gen-queries", "generate benchmark queries");
  add_graph_args(cmd_gen, gen_args);
  cmd_gen->add_option("--kind", gen_kind, "hand | bfs | random");
  cmd_gen->add_option("--length", gen_spec.length);
  cmd_gen->add_option("--count", gen_spec.count);
  cmd_gen->add_option("--seed", gen_spec.seed);
  cmd_gen->add_option("--op-rate", gen_spec.op_rate);
  cmd_gen->add_option("--wildcard-rate", gen_spec.wildcard_rate);
  cmd_gen->add_option("--hand-file", hand_file, "file with one query per line");

  // bench
  GraphArgs bench_args;
  std::string bench_engine = "central", bench_queries_file, bench_gen_kind;
  BenchSpec bench_spec;
  std::vector<int> bench_lengths{5, 10, 15, 20, 25};
  int bench_count = 5;
  auto* cmd_bench = app.add_subcommand("bench", "run the benchmark harness");
  add_graph_args(cmd_bench, bench_args);
  cmd_bench->add_option("--engine", bench_engine);
  cmd_bench->add_option("--queries-file", bench_queries_file, "one query per line");
  cmd_bench->add_option("--gen", bench_gen_kind, "generate queries: bfs | random");
  cmd_bench->add_option("--lengths", bench_lengths, "query lengths for --gen")->delimiter(',');
  cmd_bench->add_option("--count", bench_count, "queries per length");
  cmd_bench->add_option("--reps", bench_spec.repetitions);
  cmd_bench->add_flag("--opt-compare", bench_spec.opt_compare,
                      "compare the optimized plan against random plans");
  cmd_bench->add_option("--random-plans", bench_spec.random_plans);
  cmd_bench->add_option("--seed", bench_spec.seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_ingest) {
      LabeledGraph g = load_graph(ingest_args);
      std::cout << "vertices\t" << g.vertex_count() << "\n"
                << "edges\t" << g.edge_count() << "\n"
                << "labels\t" << g.label_count() << "\n"
                << "partitions\t" << g.partition_count() << "\n";
      return 0;
    }
    if (*cmd_rmat) {
      std::vector<std::string> labels;
      for (int i = 0; i < rmat.labels; ++i) labels.push_back("l" + std::to_string(i));
      LabeledGraph g = generate_rmat(rmat.nodes, rmat.avg_degree, labels, rmat.seed);
      std::ofstream ef(rmat.out_edges), lf(rmat.out_labels);
      if (!ef || !lf) throw std::runtime_error("cannot open output files");
      write_graph_files(g, ef, lf);
      std::cout << "vertices\t" << g.vertex_count() << "\nedges\t" << g.edge_count() << "\n";
      return 0;
    }
    if (*cmd_stats) {
      LabeledGraph g = load_graph(stats_args);
      StatsCatalog c = collect_stats(g, stats_opt);
      if (stats_out.empty()) {
        c.write(std::cout, g);
      } else {
        std::ofstream f(stats_out);
        c.write(f, g);
      }
      return 0;
    }
    if (*cmd_explain) {
      LabeledGraph g = load_graph(explain_args);
      PreparedQuery pq = prepare_query(g, explain_query, !explain_no_opt);
      if (explain_costs) {
        StatsCatalog stats = collect_stats(g);
        Estimator est(stats, bind_occ_labels(g, pq.logical.occs));
        EstimateState state;
        double total = 0;
        for (const auto& op : pq.physical.ops) {
          double c = est.apply(op, state);
          total += c;
          std::cout << op.to_string(pq.logical.occs) << "\tcost=" << c << "\n";
        }
        std::cout << "total\t" << total << "\n";
      } else {
        std::cout << pq.physical.to_string(pq.logical.occs);
      }
      return 0;
    }
    if (*cmd_query) {
      LabeledGraph g = load_graph(query_args);
      QueryOptions opt;
      opt.optimize = !no_opt;
      opt.partitions = query_args.partitions;
      QueryOutcome res = run_query(g, query_text, parse_engine(engine_name), opt);
      if (with_explain) std::cout << res.plan_text;
      if (count_only) {
        std::cout << res.pairs.size() << "\n";
      } else {
        for (const auto& [u, v] : res.pairs) std::cout << u << "\t" << v << "\n";
      }
      if (!message_log_path.empty()) {
        std::ofstream f(message_log_path);
        f << "round,src,dst,primitive,records\n";
        for (const auto& e : res.message_log) {
          f << e.round << "," << (e.src == kCoordinator ? std::string("coord") : std::to_string(e.src))
            << "," << e.dst << "," << e.primitive << "," << e.records << "\n";
        }
      }
      return 0;
    }
    if (*cmd_gen) {
      LabeledGraph g = load_graph(gen_args);
      if (gen_kind == "hand") {
        gen_spec.kind = QueryGenKind::Hand;
        std::ifstream f(hand_file);
        if (!f) throw std::runtime_error("cannot open --hand-file");
        std::string line;
        while (std::getline(f, line))
          if (!line.empty()) gen_spec.hand_queries.push_back(line);
      } else if (gen_kind == "bfs") {
        gen_spec.kind = QueryGenKind::Bfs;
      } else {
        gen_spec.kind = QueryGenKind::Random;
      }
      for (const auto& q : gen_queries(g, gen_spec)) std::cout << q << "\n";
      return 0;
    }
    if (*cmd_bench) {
      LabeledGraph g = load_graph(bench_args);
      bench_spec.engine = parse_engine(bench_engine);
      bench_spec.partitions = bench_args.partitions;
      if (!bench_queries_file.empty()) {
        std::ifstream f(bench_queries_file);
        if (!f) throw std::runtime_error("cannot open --queries-file");
        std::string line;
        while (std::getline(f, line))
          if (!line.empty()) bench_spec.queries.push_back(line);
      } else if (!bench_gen_kind.empty()) {
        for (std::size_t i = 0; i < bench_lengths.size(); ++i) {
          QueryGenSpec gs;
          gs.kind = bench_gen_kind == "bfs" ? QueryGenKind::Bfs : QueryGenKind::Random;
          gs.length = bench_lengths[i];
          gs.count = bench_count;
          gs.seed = bench_spec.seed + i;
          auto qs = gen_queries(g, gs);
          bench_spec.queries.insert(bench_spec.queries.end(), qs.begin(), qs.end());
        }
      } else {
        throw std::runtime_error("bench needs --queries-file or --gen");
      }
      auto rows = run_bench(g, bench_spec);
      std::cout << bench_table(rows, bench_spec.opt_compare);
      return 0;
    }
  } catch (const SyntaxError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
