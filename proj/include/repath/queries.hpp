#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "repath/cluster.hpp"
#include "repath/optimizer.hpp"
#include "repath/oracle.hpp"

namespace repath {

enum class Engine { Central, Dist, Oracle };

struct QueryOptions {
  bool optimize = true;
  std::uint32_t partitions = 1;  // Dist engine only (graph must match)
  bool instrument = false;
  int r_trunc = 8;
  StatsOptions stats;
};

struct QueryOutcome {
  std::set<std::pair<std::string, std::string>> pairs;  // external names, sorted
  std::uint64_t touches = 0;
  double wall_ms = 0;
  std::string plan_text;  // physical ops, one per line
  std::vector<std::pair<int, Direction>> order;
  std::vector<std::map<std::pair<OccId, VertexId>, int>> closure_expansions;  // instrumented runs
  std::vector<MessageLogEntry> message_log;                 // Dist engine
};

std::set<std::pair<std::string, std::string>> name_pairs(
    const LabeledGraph& g, const std::set<std::pair<VertexId, VertexId>>& pairs);

QueryOutcome run_query(const LabeledGraph& g, const std::string& query, Engine engine,
                       const QueryOptions& opt = {});

/// Lowered plan for a query: the DP order when optimizing (closures ordered
/// inner-first), the left-to-right default otherwise.
struct PreparedQuery {
  LogicalPlan logical;
  PhysicalPlan physical;
  double est_cost = 0;
};
PreparedQuery prepare_query(const LabeledGraph& g, const std::string& query, bool optimize,
                            const QueryOptions& opt = {});

/// A random legal operator order: connected growth with random directions.
std::vector<std::pair<int, Direction>> random_order(const LogicalPlan& lp, std::mt19937_64& rng);

enum class QueryGenKind { Hand, Bfs, Random };

struct QueryGenSpec {
  QueryGenKind kind = QueryGenKind::Random;
  int length = 5;
  int count = 5;
  std::uint64_t seed = 0;
  double op_rate = 0.3;        // Random: chance of grouping with | or +
  double wildcard_rate = 0.1;  // Random: chance a symbol is #
  std::vector<std::string> hand_queries;
};

/// Bfs queries follow a breadth-first tree path from a seeded start vertex,
/// so they always have at least one match; Random queries sample labels,
/// wildcards and operators at the configured rates.
std::vector<std::string> gen_queries(const LabeledGraph& g, const QueryGenSpec& spec);

struct BenchRow {
  std::string query;
  std::string engine;
  std::uint32_t partitions;
  double mean_ms;
  std::uint64_t visits;
  // --opt-compare columns: optimized vs random plans, measured in visits
  std::optional<std::uint64_t> op, max, min;
  std::optional<double> avg;
};

struct BenchSpec {
  std::vector<std::string> queries;
  Engine engine = Engine::Central;
  std::uint32_t partitions = 1;
  int repetitions = 10;
  bool opt_compare = false;
  int random_plans = 10;
  std::uint64_t seed = 0;
};

std::vector<BenchRow> run_bench(const LabeledGraph& g, const BenchSpec& spec);
std::string bench_table(const std::vector<BenchRow>& rows, bool opt_compare);

}  // namespace repath
