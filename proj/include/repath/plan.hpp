#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "repath/logical.hpp"

namespace repath {

/// Raised when an operator context matches no lowering row. The composer
/// covers every (kind, context, direction) combination, so reaching this
/// means a malformed logical plan.
struct UnsupportedShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Physical operator with all arguments and filter directives resolved at
/// plan time. The executor applies these verbatim.
struct PhysicalOp {
  enum class Kind : std::uint8_t { Load, Neighbor, SingleLink, DoubleLink, ClosureLink, SelfLink };
  // how the alternating closure walk advances:
  //   SymbolStep - single-symbol body: every reached vertex completes an
  //                iteration and continues the walk itself
  //   GraphStep  - single-edge body: hits are one edge ahead, the next head
  //                is one edge behind the hit
  //   LinkStep   - composite body: hits follow the body boundary links, the
  //                next head is one edge behind the hit
  enum class ClosureStep : std::uint8_t { SymbolStep, GraphStep, LinkStep };

  Kind kind;
  Direction dir = Direction::Forward;
  // a: Load set / Neighbor source / link-op first argument / SelfLink source
  // b: Neighbor target / link-op second argument / SelfLink head copies
  // c: SingleLink third / DoubleLink third / SelfLink tail copies
  // d: DoubleLink fourth
  std::vector<OccId> a, b, c, d;
  ClosureStep step = ClosureStep::GraphStep;
  std::vector<OccId> intersect;   // Neighbor targets that must already exist
  std::vector<OccId> self_pairs;  // occurrences self-linked after this op
  // Filter(occ, S): drop stubs of occ with no link into any class of S
  std::vector<std::pair<OccId, std::vector<OccId>>> filters;

  std::string to_string(const OccTable& occs) const;
};

struct PhysicalPlan {
  std::vector<PhysicalOp> ops;
  std::vector<std::pair<OccId, OccId>> answer_classes;  // (head occ, tail occ)
  std::vector<std::pair<int, Direction>> order;         // logical op order used
  std::string to_string(const OccTable& occs) const;
};

/// Symbolic state of the materialized region while lowering an operator
/// order. Boundary pairs (h, t) mean direct links exist between the h and t
/// occurrence classes.
struct RegionState {
  std::set<OccId> materialized;
  std::map<OccId, std::set<OccId>> tails_of;  // head anchor -> tail partners
  std::map<OccId, std::set<OccId>> heads_of;  // tail anchor -> head partners
};

/// Lowers logical operators one at a time against the region state,
/// emitting the Load/Neighbor/SingleLink/DoubleLink/ClosureLink/SelfLink
/// sequence that joins the new operator to what is already materialized.
class PlanComposer {
 public:
  explicit PlanComposer(const LogicalPlan& plan) : plan_(&plan) {}

  /// Lower plan.ops[index] with the given execution direction; returns the
  /// physical ops emitted for it (also appended to the running plan).
  std::vector<PhysicalOp> apply(int index, Direction dir);

  /// Lower an explicit op (used for closure bodies and unit tests).
  std::vector<PhysicalOp> apply_op(const LogicalOp& op, Direction dir);

  PhysicalPlan finish();

  const RegionState& state() const { return state_; }
  RegionState& mutable_state() { return state_; }  // resume from a snapshot

 private:
  std::vector<PhysicalOp> lower_concat(const LogicalOp& op, Direction dir);
  std::vector<PhysicalOp> lower_closure(const LogicalOp& op, Direction dir);
  std::vector<std::pair<OccId, std::vector<OccId>>> compose_attach(const std::vector<OccId>& X,
                                                                   const std::vector<OccId>& Y,
                                                                   std::vector<PhysicalOp>& out);
  void note_self_pairs(const std::vector<OccId>& occs, PhysicalOp& op);
  PhysicalOp make_load(std::vector<OccId> occs);

  const LogicalPlan* plan_;
  RegionState state_;
  std::vector<PhysicalOp> emitted_;
  std::vector<std::pair<int, Direction>> order_;
};

/// Default (unoptimized) plan: generation order, all forward.
PhysicalPlan default_plan(const LogicalPlan& plan);
PhysicalPlan lower_plan(const LogicalPlan& plan, const std::vector<std::pair<int, Direction>>& order);

}  // namespace repath
