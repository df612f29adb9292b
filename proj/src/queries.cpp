#include "repath/queries.hpp"

#include <chrono>
#include <deque>
#include <limits>
#include <sstream>

namespace repath {

std::set<std::pair<std::string, std::string>> name_pairs(
    const LabeledGraph& g, const std::set<std::pair<VertexId, VertexId>>& pairs) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& [u, v] : pairs) out.emplace(g.external_name(u), g.external_name(v));
  return out;
}

PreparedQuery prepare_query(const LabeledGraph& g, const std::string& query, bool optimize,
                            const QueryOptions& opt) {
  PreparedQuery out;
  RegexAst ast = parse(query);
  out.logical = gen_logical_ops(ast);
  if (optimize && !out.logical.ops.empty()) {
    StatsCatalog stats = collect_stats(g, opt.stats);
    auto occ_label = bind_occ_labels(g, out.logical.occs);
    try {
      OptimizedQuery oq = optimize_query(out.logical, stats, occ_label, opt.r_trunc);
      out.logical = std::move(oq.logical);
      out.physical = lower_plan(out.logical, oq.outer.order);
      out.est_cost = oq.outer.est_cost;
      return out;
    } catch (const std::runtime_error&) {
      // fall through to the default order (e.g. operation graph too large)
    }
  }
  out.physical = default_plan(out.logical);
  return out;
}

QueryOutcome run_query(const LabeledGraph& g, const std::string& query, Engine engine,
                       const QueryOptions& opt) {
  QueryOutcome out;
  auto t0 = std::chrono::steady_clock::now();

  if (engine == Engine::Oracle) {
    RegexAst ast = parse(query);
    out.pairs = name_pairs(g, match_pairs_bruteforce(g, ast));
  } else {
    PreparedQuery pq = prepare_query(g, query, opt.optimize, opt);
    out.plan_text = pq.physical.to_string(pq.logical.occs);
    out.order = pq.physical.order;
    if (engine == Engine::Central) {
      QueryRun run = execute_plan(g, pq.logical.occs, pq.physical, opt.instrument,
                                  &out.closure_expansions);
      out.pairs = name_pairs(g, run.pairs);
      out.touches = run.touches;
    } else {
      Cluster cluster(g, pq.logical.occs);
      cluster.execute(pq.physical);
      Workspace merged = cluster.merged();
      out.pairs = name_pairs(g, extract_pairs(merged, pq.physical));
      out.touches = cluster.touches();
      out.message_log = cluster.message_log();
    }
  }
  auto t1 = std::chrono::steady_clock::now();
  out.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return out;
}

std::vector<std::pair<int, Direction>> random_order(const LogicalPlan& lp, std::mt19937_64& rng) {
  OperationGraph g = build_operation_graph(lp.ops);
  const int n = static_cast<int>(g.vertex_count);
  std::vector<std::pair<int, Direction>> order;
  if (n == 0) return order;
  std::uint32_t done = 0;
  std::uniform_int_distribution<int> pick_start(0, n - 1);
  int first = pick_start(rng);
  while (static_cast<int>(order.size()) < n) {
    std::vector<int> candidates;
    for (int v = 0; v < n; ++v) {
      if (done & (1u << v)) continue;
      if (order.empty() ? v == first : g.adjacent(v, done)) candidates.push_back(v);
    }
    if (candidates.empty()) {  // disconnected operation graph: take any rest
      for (int v = 0; v < n; ++v)
        if (!(done & (1u << v))) candidates.push_back(v);
    }
    int v = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
    Direction dir = std::uniform_int_distribution<int>(0, 1)(rng) ? Direction::Backward
                                                                  : Direction::Forward;
    order.emplace_back(v, dir);
    done |= 1u << v;
  }
  return order;
}

namespace {

std::string bfs_query(const LabeledGraph& g, int length, std::mt19937_64& rng) {
  auto verts = g.all_vertices();
  if (verts.empty()) return "";
  std::uniform_int_distribution<std::size_t> pick(0, verts.size() - 1);
  for (int attempt = 0; attempt < 64; ++attempt) {
    VertexId start = verts[pick(rng)];
    // breadth-first tree from start; take the labels along a tree path
    std::map<VertexId, VertexId> parent;
    std::map<VertexId, int> depth;
    std::deque<VertexId> work{start};
    depth[start] = 0;
    VertexId deepest = start;
    while (!work.empty()) {
      VertexId v = work.front();
      work.pop_front();
      if (depth[v] > depth[deepest]) deepest = v;
      if (depth[v] + 1 >= length) continue;
      for (VertexId u : g.out_neighbors(v)) {
        if (depth.count(u)) continue;
        depth[u] = depth[v] + 1;
        parent[u] = v;
        work.push_back(u);
      }
    }
    if (depth[deepest] + 1 < std::min(length, 2)) continue;
    std::vector<VertexId> path;
    for (VertexId v = deepest;; v = parent[v]) {
      path.push_back(v);
      if (v == start) break;
    }
    std::reverse(path.begin(), path.end());
    std::string q;
    for (VertexId v : path) {
      const std::string& l = g.label_name(g.label_of(v));
      q += l.size() == 1 ? l : "'" + l + "'";
    }
    if (!q.empty()) return q;
  }
  // fall back to a single vertex label
  VertexId v = verts[pick(rng)];
  return g.label_name(g.label_of(v));
}

std::string random_query(const LabeledGraph& g, const QueryGenSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0, 1);
  std::vector<std::string> labels;
  for (LabelId l = 0; l < g.label_count(); ++l) labels.push_back(g.label_name(l));
  auto symbol = [&]() -> std::string {
    if (!labels.empty() && unit(rng) >= spec.wildcard_rate) {
      const std::string& l = labels[std::uniform_int_distribution<std::size_t>(
          0, labels.size() - 1)(rng)];
      return l.size() == 1 ? l : "'" + l + "'";
    }
    return "#";
  };
  // assemble `length` symbols, then group random spans with | or +
  std::vector<std::string> parts;
  for (int i = 0; i < spec.length; ++i) parts.push_back(symbol());
  int groups = 0;
  for (std::size_t i = 0; i + 1 < parts.size() && groups < spec.length / 2; ++i) {
    if (unit(rng) >= spec.op_rate) continue;
    ++groups;
    if (unit(rng) < 0.5) {
      parts[i] = "(" + parts[i] + "|" + parts[i + 1] + ")";
      parts.erase(parts.begin() + static_cast<long>(i) + 1);
    } else {
      std::size_t span = std::min<std::size_t>(2, parts.size() - i);
      std::string body;
      for (std::size_t j = i; j < i + span; ++j) body += parts[j];
      parts[i] = "(" + body + ")+";
      parts.erase(parts.begin() + static_cast<long>(i) + 1,
                  parts.begin() + static_cast<long>(i + span));
    }
  }
  std::string q;
  for (const auto& p : parts) q += p;
  return q;
}

}  // namespace

std::vector<std::string> gen_queries(const LabeledGraph& g, const QueryGenSpec& spec) {
  std::vector<std::string> out;
  std::mt19937_64 rng(spec.seed);
  switch (spec.kind) {
    case QueryGenKind::Hand:
      out = spec.hand_queries;
      if (static_cast<int>(out.size()) > spec.count) out.resize(spec.count);
      break;
    case QueryGenKind::Bfs:
      for (int i = 0; i < spec.count; ++i) out.push_back(bfs_query(g, spec.length, rng));
      break;
    case QueryGenKind::Random:
      for (int i = 0; i < spec.count; ++i) out.push_back(random_query(g, spec, rng));
      break;
  }
  return out;
}

std::vector<BenchRow> run_bench(const LabeledGraph& g, const BenchSpec& spec) {
  std::vector<BenchRow> rows;
  std::mt19937_64 rng(spec.seed);
  for (const auto& q : spec.queries) {
    BenchRow row;
    row.query = q;
    row.engine = spec.engine == Engine::Central ? "central"
                 : spec.engine == Engine::Dist  ? "dist"
                                                : "oracle";
    row.partitions = spec.engine == Engine::Dist ? spec.partitions : 1;
    double total_ms = 0;
    std::uint64_t visits = 0;
    QueryOptions opt;
    opt.partitions = spec.partitions;
    for (int r = 0; r < spec.repetitions; ++r) {
      QueryOutcome res = run_query(g, q, spec.engine, opt);
      total_ms += res.wall_ms;
      visits = res.touches;
    }
    row.mean_ms = total_ms / std::max(1, spec.repetitions);
    row.visits = visits;
    if (spec.opt_compare && spec.engine != Engine::Oracle) {
      PreparedQuery optimized = prepare_query(g, q, true);
      std::uint64_t op_visits = cost_of_plan_measured(g, optimized.logical.occs, optimized.physical);
      std::uint64_t mx = 0, mn = std::numeric_limits<std::uint64_t>::max();
      double sum = 0;
      int done = 0;
      for (int i = 0; i < spec.random_plans; ++i) {
        auto order = random_order(optimized.logical, rng);
        PhysicalPlan plan = lower_plan(optimized.logical, order);
        std::uint64_t v = cost_of_plan_measured(g, optimized.logical.occs, plan);
        mx = std::max(mx, v);
        mn = std::min(mn, v);
        sum += static_cast<double>(v);
        ++done;
      }
      row.op = op_visits;
      if (done > 0) {
        row.max = mx;
        row.min = mn;
        row.avg = sum / done;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string bench_table(const std::vector<BenchRow>& rows, bool opt_compare) {
  std::ostringstream os;
  os << "query\tengine\tpartitions\ttime_ms\tvisits";
  if (opt_compare) os << "\tOp\tMax\tMin\tAvg";
  os << "\n";
  for (const auto& r : rows) {
    os << r.query << "\t" << r.engine << "\t" << r.partitions << "\t" << r.mean_ms << "\t"
       << r.visits;
    if (opt_compare) {
      os << "\t" << (r.op ? std::to_string(*r.op) : "-") << "\t"
         << (r.max ? std::to_string(*r.max) : "-") << "\t"
         << (r.min ? std::to_string(*r.min) : "-") << "\t";
      if (r.avg)
        os << *r.avg;
      else
        os << "-";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace repath
