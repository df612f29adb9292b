#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "repath/types.hpp"

namespace repath {

struct MissingLinkClassError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Intermediate-result record for one graph vertex under one occurrence.
/// Links are kept per role: `out` partners sit on the tail side of the pair,
/// `in` partners on the head side. The split matters when a link class joins
/// an occurrence to itself (shared closure boundaries), where a symmetric
/// store would lose the pair orientation.
struct Stub {
  VertexId vertex;
  std::map<OccId, std::set<VertexId>> out, in;
};

/// The per-query intermediate-result store: one stub set R_x per occurrence
/// plus the links between stubs, mirrored on both endpoints. The graph
/// itself is never touched. Single writer during execution.
class Workspace {
 public:
  using StubSet = std::map<VertexId, Stub>;

  Stub& ensure(OccId occ, VertexId v);
  Stub* find(OccId occ, VertexId v);
  const Stub* find(OccId occ, VertexId v) const;
  bool has(OccId occ, VertexId v) const { return find(occ, v) != nullptr; }

  const StubSet& set_of(OccId occ) const;
  std::size_t size_of(OccId occ) const;

  /// Adds (head_occ, head_v) -> (tail_occ, tail_v) in expression orientation.
  void link(OccId head_occ, VertexId head_v, OccId tail_occ, VertexId tail_v);
  /// One-sided halves for sharded stores that own a single endpoint.
  void add_out(OccId occ, VertexId v, OccId tail_occ, VertexId tail_v);
  void add_in(OccId occ, VertexId v, OccId head_occ, VertexId head_v);

  bool link_class_built(OccId o1, OccId o2) const;
  void register_link_class(OccId o1, OccId o2);

  /// Remove stubs of occ without a link (either role) into any of the
  /// required classes; partner entries are erased with them.
  void filter(OccId occ, std::span<const OccId> required);
  void remove(OccId occ, VertexId v);

  /// Pairs of the (a, b) link class, a on the head side.
  std::set<std::pair<VertexId, VertexId>> links_between(OccId a, OccId b) const;

  /// Canonical text form for equality assertions.
  std::string dump() const;

  const std::map<OccId, StubSet>& sets() const { return sets_; }

 private:
  std::map<OccId, StubSet> sets_;
  std::set<std::pair<OccId, OccId>> link_classes_;
};

}  // namespace repath
