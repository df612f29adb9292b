#pragma once

#include <set>
#include <string>
#include <vector>

#include "repath/regex.hpp"
#include "repath/types.hpp"

namespace repath {

struct ArityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Query-wide occurrence table. Holds the AST occurrences first, followed by
/// copies allocated for single-symbol closures (the a1/a2 slots of SelfLink).
class OccTable {
 public:
  explicit OccTable(const RegexAst& ast) {
    for (const auto& s : ast.occurrences()) entries_.push_back({s, s == "#", kNoOcc});
  }
  OccTable() = default;

  OccId add_copy(OccId of) {
    entries_.push_back({entries_[of].symbol, entries_[of].wildcard, of});
    return static_cast<OccId>(entries_.size() - 1);
  }

  std::size_t size() const { return entries_.size(); }
  const std::string& symbol(OccId o) const { return entries_[o].symbol; }
  bool wildcard(OccId o) const { return entries_[o].wildcard; }
  /// kNoOcc for original occurrences, the source occurrence for copies.
  OccId copy_of(OccId o) const { return entries_[o].copy_of; }

  std::string set_to_string(const std::vector<OccId>& occs) const;

 private:
  struct Entry {
    std::string symbol;
    bool wildcard;
    OccId copy_of;
  };
  std::vector<Entry> entries_;
};

/// One basic operator of the expression. Concat joins the tail side of the
/// left part to the head side of the right part. Closure is an atomic unit
/// covering the whole `(body)+`; a body that is a single concatenation of
/// symbol sets is absorbed into the closure (it runs as one graph-alternating
/// search, not as a separate concat).
struct LogicalOp {
  enum class Kind : std::uint8_t { Concat, Closure };
  enum class BodyShape : std::uint8_t { Symbols, Edge, Composite };

  Kind kind = Kind::Concat;

  // Concat
  std::vector<OccId> left, right;

  // Closure
  BodyShape body = BodyShape::Symbols;
  std::vector<OccId> head, tail;    // closure boundary (copies for Symbols)
  std::vector<OccId> base;          // Symbols: the original occurrences to load
  std::vector<LogicalOp> inner;     // Composite: body plan, ordered
  Direction exec_dir = Direction::Forward;  // used when this op sits in an inner plan

  std::string to_string(const OccTable& occs) const;
};

/// Logical plan plus the occurrence bookkeeping the planner needs.
struct LogicalPlan {
  std::vector<LogicalOp> ops;  // default order: left-to-right generation order
  OccTable occs;
  std::set<OccId> query_heads, query_tails;
  /// Occurrences that are single-symbol alternation branches (present in both
  /// the head and tail side of some sub-expression). Their stubs self-pair.
  std::set<OccId> self_paired;
};

/// Tri-column stack over the postfix program: symbols push a frame, `|`
/// merges prefixes/postfixes, `-` emits a concat joining postfix(left) to
/// prefix(right), `+` emits a closure over the top frame. Throws ArityError
/// on stack underflow.
LogicalPlan gen_logical_ops(const PostfixProgram& program, const RegexAst& ast);
LogicalPlan gen_logical_ops(const RegexAst& ast);

std::size_t count_logical_ops(const LogicalPlan& plan);  // closure inners included

}  // namespace repath
