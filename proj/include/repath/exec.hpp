#pragma once

#include <map>
#include <set>
#include <vector>

#include "repath/graph.hpp"
#include "repath/plan.hpp"
#include "repath/workspace.hpp"

namespace repath {

/// Per-query execution state for the centralized engine. `touches` counts
/// vertex/link touches and is the empirical cost proxy reported by bench.
struct ExecContext {
  ExecContext(const LabeledGraph& graph, const OccTable& occs);

  const LabeledGraph* g;
  Workspace ws;
  std::vector<LabelId> occ_label;  // occurrence -> bound graph label
  std::uint64_t touches = 0;

  bool instrument_closures = false;
  /// One entry per executed ClosureLink: (occurrence, vertex) -> expansions.
  std::vector<std::map<std::pair<OccId, VertexId>, int>> closure_expansions;

  LabelId label(OccId o) const { return occ_label[o]; }
};

void op_load(ExecContext& cx, const std::vector<OccId>& occs);
void op_self_link(ExecContext& cx, const std::vector<OccId>& src, const std::vector<OccId>& head_copies,
                  const std::vector<OccId>& tail_copies);
void op_neighbor(ExecContext& cx, const std::vector<OccId>& src, const std::vector<OccId>& dst,
                 Direction dir, const std::vector<OccId>& intersect = {});
void op_single_link(ExecContext& cx, const std::vector<OccId>& a, const std::vector<OccId>& b,
                    const std::vector<OccId>& c);
void op_double_link(ExecContext& cx, const std::vector<OccId>& a, const std::vector<OccId>& b,
                    const std::vector<OccId>& c, const std::vector<OccId>& d);
void op_closure_link(ExecContext& cx, const std::vector<OccId>& head, const std::vector<OccId>& tail,
                     Direction dir, PhysicalOp::ClosureStep step);

/// Applies one lowered operator including its self-pair and filter directives.
void run_physical(ExecContext& cx, const PhysicalOp& op);

std::set<std::pair<VertexId, VertexId>> extract_pairs(const Workspace& ws, const PhysicalPlan& plan);

struct QueryRun {
  std::set<std::pair<VertexId, VertexId>> pairs;
  std::uint64_t touches = 0;
};

QueryRun execute_plan(const LabeledGraph& g, const OccTable& occs, const PhysicalPlan& plan,
                      bool instrument = false,
                      std::vector<std::map<std::pair<OccId, VertexId>, int>>* expansions = nullptr);

}  // namespace repath
