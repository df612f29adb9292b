#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "repath/types.hpp"

namespace repath {

struct SyntaxError : std::runtime_error {
  std::size_t position;
  SyntaxError(std::size_t pos, const std::string& msg)
      : std::runtime_error("SyntaxError at byte " + std::to_string(pos) + ": " + msg),
        position(pos) {}
};

/// Parsed query. Symbols carry distinct occurrence ids assigned left to
/// right; `#` is the wildcard. Precedence: `+` > concatenation > `|`.
class RegexAst {
 public:
  enum class Kind : std::uint8_t { Symbol, Concat, Alt, Plus };

  struct Node {
    Kind kind;
    int lhs = -1, rhs = -1;  // Plus uses lhs only
    std::string symbol;      // Symbol only
    bool wildcard = false;
    OccId occ = kNoOcc;
  };

  int root() const { return root_; }
  const Node& node(int i) const { return nodes_[i]; }
  std::size_t node_count() const { return nodes_.size(); }

  /// Occurrence table: id -> symbol text (in left-to-right query order).
  const std::vector<std::string>& occurrences() const { return occ_symbols_; }
  bool occurrence_is_wildcard(OccId o) const { return occ_symbols_[o] == "#"; }

  /// Set when a wildcard appears under `+`; the engine still treats `#`
  /// as "any label" there, this only surfaces the situation to callers.
  bool wildcard_in_closure() const { return wildcard_in_closure_; }

  int add_symbol(std::string symbol);
  int add_concat(int lhs, int rhs);
  int add_alt(int lhs, int rhs);
  int add_plus(int child);
  void set_root(int r) { root_ = r; }
  void finalize();  // assigns wildcard_in_closure_

 private:
  std::vector<Node> nodes_;
  std::vector<std::string> occ_symbols_;
  int root_ = -1;
  bool wildcard_in_closure_ = false;
};

RegexAst parse(std::string_view query);

/// Canonical printer; parse(print(ast)) reproduces the structure.
std::string print(const RegexAst& ast);

struct PostfixToken {
  enum class Kind : std::uint8_t { Symbol, Concat, Alt, Plus };
  Kind kind;
  OccId occ = kNoOcc;
};
using PostfixProgram = std::vector<PostfixToken>;

PostfixProgram to_postfix(const RegexAst& ast);
std::string postfix_to_string(const RegexAst& ast, const PostfixProgram& p);

/// head = occurrences that can begin a match, tail = occurrences that can
/// end one. Alt unions both sides, Concat takes head-of-left/tail-of-right,
/// Plus is transparent.
std::pair<std::set<OccId>, std::set<OccId>> head_tail(const RegexAst& ast);
std::pair<std::set<OccId>, std::set<OccId>> head_tail(const RegexAst& ast, int node);

bool ast_equal(const RegexAst& a, const RegexAst& b);

}  // namespace repath
