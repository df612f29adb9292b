#pragma once

#include <map>
#include <vector>

#include "repath/plan.hpp"
#include "repath/stats.hpp"

namespace repath {

struct MissingUpstreamError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-occurrence size and per-pair link estimates, updated as operators are
/// (virtually) applied. Values are per-source-node link averages.
struct EstimateState {
  std::map<OccId, double> size;
  std::map<std::pair<OccId, OccId>, double> link;

  bool has_size(OccId o) const { return size.count(o) > 0; }
  double size_of(OccId o) const;                // throws MissingUpstream
  double link_of(OccId a, OccId b) const;       // 0 when absent
};

std::vector<LabelId> bind_occ_labels(const LabeledGraph& g, const OccTable& occs);

/// Evaluates the operator size/link rows and cost rows over an EstimateState.
/// Single-label variables use the scalar rows; multi-label variables use the
/// Cartesian-sum extension, and multi-label closures the matrix series.
class Estimator {
 public:
  Estimator(const StatsCatalog& stats, std::vector<LabelId> occ_label, int r_trunc = 8)
      : stats_(&stats), occ_label_(std::move(occ_label)), r_trunc_(r_trunc) {}

  /// Cost of one lowered operator against the current state (Table rows).
  double est_cost(const PhysicalOp& op, const EstimateState& e) const;
  /// Size/link updates of one lowered operator (applied in place).
  void est_size_link(const PhysicalOp& op, EstimateState& e) const;
  /// Both, returning the cost.
  double apply(const PhysicalOp& op, EstimateState& e) const;

  double apply_all(const std::vector<PhysicalOp>& ops, EstimateState& e) const;

  LabelId label(OccId o) const { return occ_label_[o]; }
  int r_trunc() const { return r_trunc_; }
  const StatsCatalog& stats() const { return *stats_; }

 private:
  double load_cost(const PhysicalOp& op) const;
  double seeded_link(OccId a, OccId b, const EstimateState& e) const;
  double seeded_size(OccId o, const EstimateState& e) const;
  const StatsCatalog* stats_;
  std::vector<LabelId> occ_label_;
  int r_trunc_;
};

/// Closure estimate via the matrix series: builds A, B, P, R, L, T1, T2 from
/// the per-label statistics, returns the summed cost (F plus the truncated E
/// series) and the truncated link-count series N (one entry per label pair).
struct ClosureMatrixEstimate {
  double cost = 0;
  std::vector<std::vector<double>> links;  // N: |a_occs| x |b_occs|
};
ClosureMatrixEstimate est_closure_matrix(const std::vector<OccId>& a_occs,
                                         const std::vector<OccId>& b_occs, const Estimator& est,
                                         const EstimateState& e, int r_trunc);

}  // namespace repath
