#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "repath/graph.hpp"

namespace repath {

struct StatsOptions {
  double eps_p = 1e-4;   // Pro entries below this are dropped
  double eps_t = 1e-4;   // TNeighbor entries below this are dropped
  double delta_p = 1e-5; // substitute for dropped Pro
  double delta_t = 1.0;  // substitute for dropped TNeighbor
};

/// Per-label statistics collected in one pass per direction: Num(l),
/// Neighbor(l), Pro(l1,l2) and T_Neighbor(l1,l2), with threshold pruning so
/// the catalog stays small for label-heavy graphs. The in-direction tables
/// come from the transposed relation and serve the leftward operators.
class StatsCatalog {
 public:
  double num(LabelId l) const;                              // Num(#) = n
  double neighbor_avg(LabelId l, Direction d) const;        // avg degree
  double pro(LabelId l1, LabelId l2, Direction d) const;    // delta_p if pruned
  double t_neighbor(LabelId l1, LabelId l2, Direction d) const;

  std::size_t label_count() const { return label_count_; }
  std::size_t vertex_count() const { return n_; }
  std::size_t stored_pair_entries() const;
  const StatsOptions& options() const { return opt_; }

  /// Sorted text table `kind,label[,label2],value`, diffable across runs.
  void write(std::ostream& os, const LabeledGraph& g) const;

  struct DirTables {
    std::map<LabelId, double> neighbor_avg;            // avg degree per label
    std::map<LabelId, double> pro_any;                 // P(>=1 neighbor at all)
    std::map<std::pair<LabelId, LabelId>, double> pro; // thresholded
    std::map<std::pair<LabelId, LabelId>, double> tn;  // thresholded
    double global_avg_degree = 0;
  };

 private:
  friend StatsCatalog collect_stats(const LabeledGraph&, const StatsOptions&);

  const DirTables& tables(Direction d) const {
    return d == Direction::Forward ? out_ : in_;
  }

  StatsOptions opt_;
  std::size_t n_ = 0;
  std::size_t label_count_ = 0;
  std::map<LabelId, double> num_;
  DirTables out_, in_;
};

StatsCatalog collect_stats(const LabeledGraph& g, const StatsOptions& opt = {});

}  // namespace repath
