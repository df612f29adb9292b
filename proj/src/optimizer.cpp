#include "repath/optimizer.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace repath {

bool OperationGraph::adjacent(int v, std::uint32_t subset) const {
  for (int u : adjacency[v])
    if (subset & (1u << u)) return true;
  return false;
}

namespace {

std::set<OccId> op_footprint(const LogicalOp& op) {
  std::set<OccId> out;
  if (op.kind == LogicalOp::Kind::Concat) {
    out.insert(op.left.begin(), op.left.end());
    out.insert(op.right.begin(), op.right.end());
  } else {
    out.insert(op.head.begin(), op.head.end());
    out.insert(op.tail.begin(), op.tail.end());
  }
  return out;
}

}  // namespace

OperationGraph build_operation_graph(const std::vector<LogicalOp>& ops) {
  OperationGraph g;
  g.vertex_count = ops.size();
  g.adjacency.resize(ops.size());
  for (const auto& op : ops) g.footprint.push_back(op_footprint(op));
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (std::size_t j = i + 1; j < ops.size(); ++j) {
      bool shared = std::any_of(g.footprint[i].begin(), g.footprint[i].end(),
                                [&](OccId o) { return g.footprint[j].count(o) > 0; });
      if (shared) {
        g.adjacency[i].push_back(static_cast<int>(j));
        g.adjacency[j].push_back(static_cast<int>(i));
      }
    }
  }
  return g;
}

double step_cost(const LogicalPlan& lp, const Estimator& est, RegionState& region,
                 EstimateState& state, int index, Direction dir) {
  PlanComposer composer(lp);
  composer.mutable_state() = region;
  auto ops = composer.apply(index, dir);
  region = composer.state();
  return est.apply_all(ops, state);
}

std::pair<RegionState, EstimateState> replay_subset(const LogicalPlan& lp, const Estimator& est,
                                                    const std::vector<int>& ops_sorted) {
  RegionState region;
  EstimateState state;
  for (int i : ops_sorted) step_cost(lp, est, region, state, i, Direction::Forward);
  return {std::move(region), std::move(state)};
}

double candidate_cost(const LogicalPlan& lp, const Estimator& est, const RegionState& region,
                      const EstimateState& state, int index, Direction dir) {
  RegionState r = region;
  EstimateState s = state;
  return step_cost(lp, est, r, s, index, dir);
}

OptimizeResult dp_optimize(const LogicalPlan& lp, const Estimator& est) {
  OperationGraph g = build_operation_graph(lp.ops);
  const int n = static_cast<int>(g.vertex_count);
  OptimizeResult result;
  if (n == 0) return result;
  if (n > 24) throw std::runtime_error("operation graph too large for the bitmap DP");

  struct Entry {
    double cost = std::numeric_limits<double>::infinity();
    int last_op = -1;
    Direction last_dir = Direction::Forward;
    RegionState region;   // canonical subset context (ascending replay)
    EstimateState state;
  };
  std::map<std::uint32_t, Entry> table;

  auto subset_ops = [&](std::uint32_t key) {
    std::vector<int> ops;
    for (int v = 0; v < n; ++v)
      if (key & (1u << v)) ops.push_back(v);
    return ops;
  };
  auto ensure_entry = [&](std::uint32_t key) -> Entry& {
    Entry& e = table[key];
    if (e.region.materialized.empty() && e.state.size.empty()) {
      auto [region, state] = replay_subset(lp, est, subset_ops(key));
      e.region = std::move(region);
      e.state = std::move(state);
    }
    return e;
  };

  auto try_step = [&](const Entry& base, int v, Entry& slot) {
    for (Direction dir : {Direction::Forward, Direction::Backward}) {
      double c = base.cost + candidate_cost(lp, est, base.region, base.state, v, dir);
      ++result.subsets_evaluated;
      bool better = c < slot.cost ||
                    (c == slot.cost && (v < slot.last_op ||
                                        (v == slot.last_op && dir == Direction::Forward &&
                                         slot.last_dir == Direction::Backward)));
      if (better) {
        slot.cost = c;
        slot.last_op = v;
        slot.last_dir = dir;
      }
    }
  };

  // phase 1: singletons
  std::set<std::uint32_t> frontier;
  Entry empty;
  empty.cost = 0;
  for (int v = 0; v < n; ++v) {
    try_step(empty, v, ensure_entry(1u << v));
    frontier.insert(1u << v);
  }
  // phase i: grow connected subsets by one adjacent vertex
  for (int size = 2; size <= n; ++size) {
    std::set<std::uint32_t> next;
    for (std::uint32_t key : frontier) {
      if (table.at(key).last_op < 0) continue;
      for (int v = 0; v < n; ++v) {
        if (key & (1u << v)) continue;
        if (!g.adjacent(v, key)) continue;
        std::uint32_t nk = key | (1u << v);
        Entry& slot = ensure_entry(nk);
        try_step(table.at(key), v, slot);
        next.insert(nk);
      }
    }
    frontier = std::move(next);
  }
  result.dp_entries = table.size();

  std::uint32_t full = (1u << n) - 1;
  auto it = table.find(full);
  if (it == table.end() || it->second.last_op < 0)
    throw std::runtime_error("no feasible plan order found");
  result.est_cost = it->second.cost;

  // backtrack R[V]
  std::vector<std::pair<int, Direction>> rev;
  std::uint32_t key = full;
  while (key) {
    const Entry& e = table.at(key);
    rev.emplace_back(e.last_op, e.last_dir);
    key &= ~(1u << e.last_op);
  }
  result.order.assign(rev.rbegin(), rev.rend());
  return result;
}

namespace {

void optimize_inner_closures(std::vector<LogicalOp>& ops, const LogicalPlan& lp,
                             const Estimator& est) {
  for (auto& op : ops) {
    if (op.kind != LogicalOp::Kind::Closure) continue;
    if (op.body == LogicalOp::BodyShape::Composite) {
      optimize_inner_closures(op.inner, lp, est);
      LogicalPlan body;
      body.ops = op.inner;
      body.occs = lp.occs;
      body.self_paired = lp.self_paired;
      body.query_heads.insert(op.head.begin(), op.head.end());
      body.query_tails.insert(op.tail.begin(), op.tail.end());
      OptimizeResult r = dp_optimize(body, est);
      std::vector<LogicalOp> reordered;
      for (auto [i, dir] : r.order) {
        LogicalOp o = op.inner[i];
        o.exec_dir = dir;
        reordered.push_back(std::move(o));
      }
      op.inner = std::move(reordered);
    }
    // Edge and Symbols bodies are already a single ClosureLink; the DP picks
    // their direction at the outer level
  }
}

}  // namespace

OptimizedQuery optimize_query(const LogicalPlan& lp, const StatsCatalog& stats,
                              const std::vector<LabelId>& occ_label, int r_trunc) {
  Estimator est(stats, occ_label, r_trunc);
  OptimizedQuery out;
  out.logical = lp;
  optimize_inner_closures(out.logical.ops, lp, est);
  out.outer = dp_optimize(out.logical, est);
  return out;
}

std::uint64_t cost_of_plan_measured(const LabeledGraph& g, const OccTable& occs,
                                    const PhysicalPlan& plan) {
  return execute_plan(g, occs, plan).touches;
}

}  // namespace repath
