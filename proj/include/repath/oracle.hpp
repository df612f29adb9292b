#pragma once

#include <set>
#include <utility>
#include <vector>

#include "repath/graph.hpp"
#include "repath/regex.hpp"

namespace repath {

struct TooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thompson-style NFA over label symbols; `#` edges match any label.
/// One-or-more semantics for Plus. Exists to be slow and right.
class Nfa {
 public:
  struct Edge {
    std::string symbol;  // empty = epsilon
    int to;
  };

  int start() const { return start_; }
  bool accepting(int s) const { return accept_.count(s) > 0; }
  std::size_t state_count() const { return edges_.size(); }
  const std::vector<Edge>& edges_from(int s) const { return edges_[s]; }

  /// States reachable from `states` by epsilon edges (closure includes input).
  std::set<int> eps_closure(const std::set<int>& states) const;
  /// One consumption step on `label`, epsilon-closed.
  std::set<int> step(const std::set<int>& states, const std::string& label) const;

  /// True iff the NFA accepts the exact label sequence.
  bool accepts(const std::vector<std::string>& word) const;

  int new_state() {
    edges_.emplace_back();
    return static_cast<int>(edges_.size()) - 1;
  }
  void add_edge(int from, std::string symbol, int to) { edges_[from].push_back({std::move(symbol), to}); }
  void set_start(int s) { start_ = s; }
  void set_accepting(std::set<int> acc) { accept_ = std::move(acc); }

 private:
  std::vector<std::vector<Edge>> edges_;
  std::set<int> accept_;
  int start_ = 0;
};

Nfa build_nfa(const RegexAst& ast);

/// Ground truth: product of the NFA with the graph, reachability over
/// (vertex, state) pairs. The start vertex's label is consumed first; walk
/// semantics (vertices may repeat). Guard: states * vertices <= 10^6.
std::set<std::pair<VertexId, VertexId>> match_pairs_bruteforce(const LabeledGraph& g,
                                                               const RegexAst& ast);

}  // namespace repath
