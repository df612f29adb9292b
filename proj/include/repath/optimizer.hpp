#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "repath/estimate.hpp"
#include "repath/exec.hpp"
#include "repath/plan.hpp"

namespace repath {

/// Vertices are a query's basic operators; an edge joins two operators that
/// share an endpoint occurrence. Plans are connected-growth orders over it.
struct OperationGraph {
  std::size_t vertex_count = 0;
  std::vector<std::vector<int>> adjacency;          // vertex -> neighbors
  std::vector<std::set<OccId>> footprint;           // vertex -> occurrences
  bool adjacent(int v, std::uint32_t subset) const; // v touches any subset vertex
};

OperationGraph build_operation_graph(const std::vector<LogicalOp>& ops);

struct OptimizeResult {
  std::vector<std::pair<int, Direction>> order;
  double est_cost = 0;
  std::size_t dp_entries = 0;      // DP table size (complexity checks)
  std::size_t subsets_evaluated = 0;
};

/// Cost of executing op `index` in direction `dir` given the region and
/// estimate context; updates both. The same lowering drives the executor, so
/// estimated and real plans stay structurally identical.
double step_cost(const LogicalPlan& lp, const Estimator& est, RegionState& region,
                 EstimateState& state, int index, Direction dir);

/// Canonical boundary context of an operator subset: the subset replayed in
/// ascending index order. Per-step costs are functions of (op, direction,
/// prefix set) only, which makes the DP recursion exact.
std::pair<RegionState, EstimateState> replay_subset(const LogicalPlan& lp, const Estimator& est,
                                                    const std::vector<int>& ops_sorted);

/// Cost of op `index`/`dir` against a subset context (state left untouched).
double candidate_cost(const LogicalPlan& lp, const Estimator& est, const RegionState& region,
                      const EstimateState& state, int index, Direction dir);

/// Dynamic programming over connected subsets of the operation graph,
/// cheaper-direction per operator, deterministic tie-break on
/// (vertex index, forward-first).
OptimizeResult dp_optimize(const LogicalPlan& lp, const Estimator& est);

/// Orders every composite closure body first (innermost outward); each
/// optimized closure then enters the enclosing DP as one atomic operator.
/// Returns the plan copy with reordered bodies plus the outer order.
struct OptimizedQuery {
  LogicalPlan logical;
  OptimizeResult outer;
};
OptimizedQuery optimize_query(const LogicalPlan& lp, const StatsCatalog& stats,
                              const std::vector<LabelId>& occ_label, int r_trunc = 8);

/// Executes the plan counting vertex/link touches; the empirical cost proxy.
std::uint64_t cost_of_plan_measured(const LabeledGraph& g, const OccTable& occs,
                                    const PhysicalPlan& plan);

}  // namespace repath
