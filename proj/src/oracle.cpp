#include "repath/oracle.hpp"

#include <deque>

namespace repath {

std::set<int> Nfa::eps_closure(const std::set<int>& states) const {
  std::set<int> out = states;
  std::deque<int> work(states.begin(), states.end());
  while (!work.empty()) {
    int s = work.front();
    work.pop_front();
    for (const Edge& e : edges_[s]) {
      if (e.symbol.empty() && out.insert(e.to).second) work.push_back(e.to);
    }
  }
  return out;
}

std::set<int> Nfa::step(const std::set<int>& states, const std::string& label) const {
  std::set<int> out;
  for (int s : states) {
    for (const Edge& e : edges_[s]) {
      if (e.symbol.empty()) continue;
      if (e.symbol == "#" || e.symbol == label) out.insert(e.to);
    }
  }
  return eps_closure(out);
}

bool Nfa::accepts(const std::vector<std::string>& word) const {
  std::set<int> cur = eps_closure({start_});
  for (const auto& l : word) cur = step(cur, l);
  for (int s : cur)
    if (accepting(s)) return true;
  return false;
}

namespace {

struct Frag {
  int start;
  std::set<int> accepts;
};

Frag build(Nfa& nfa, const RegexAst& ast, int node) {
  const auto& n = ast.node(node);
  switch (n.kind) {
    case RegexAst::Kind::Symbol: {
      int s = nfa.new_state();
      int t = nfa.new_state();
      nfa.add_edge(s, n.symbol, t);
      return {s, {t}};
    }
    case RegexAst::Kind::Concat: {
      Frag a = build(nfa, ast, n.lhs);
      Frag b = build(nfa, ast, n.rhs);
      for (int acc : a.accepts) nfa.add_edge(acc, "", b.start);
      return {a.start, b.accepts};
    }
    case RegexAst::Kind::Alt: {
      Frag a = build(nfa, ast, n.lhs);
      Frag b = build(nfa, ast, n.rhs);
      int s = nfa.new_state();
      nfa.add_edge(s, "", a.start);
      nfa.add_edge(s, "", b.start);
      std::set<int> acc = a.accepts;
      acc.insert(b.accepts.begin(), b.accepts.end());
      return {s, acc};
    }
    case RegexAst::Kind::Plus: {
      Frag a = build(nfa, ast, n.lhs);
      for (int acc : a.accepts) nfa.add_edge(acc, "", a.start);
      return a;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

Nfa build_nfa(const RegexAst& ast) {
  Nfa nfa;
  Frag f = build(nfa, ast, ast.root());
  nfa.set_start(f.start);
  nfa.set_accepting(f.accepts);
  return nfa;
}

std::set<std::pair<VertexId, VertexId>> match_pairs_bruteforce(const LabeledGraph& g,
                                                               const RegexAst& ast) {
  Nfa nfa = build_nfa(ast);
  if (nfa.state_count() * std::max<std::size_t>(g.vertex_count(), 1) > 1000000)
    throw TooLargeError("product construction guard exceeded");

  const std::size_t ns = nfa.state_count();
  auto key = [&](std::size_t vidx, int s) { return vidx * ns + static_cast<std::size_t>(s); };

  std::vector<VertexId> verts = g.all_vertices();
  std::map<VertexId, std::size_t> vidx;
  for (std::size_t i = 0; i < verts.size(); ++i) vidx[verts[i]] = i;

  std::set<std::pair<VertexId, VertexId>> result;
  std::set<int> start_closure = nfa.eps_closure({nfa.start()});

  for (std::size_t ui = 0; ui < verts.size(); ++ui) {
    VertexId u = verts[ui];
    // consume the start vertex's own label first
    std::set<int> after = nfa.step(start_closure, g.label_name(g.label_of(u)));
    if (after.empty()) continue;

    std::vector<char> seen(verts.size() * ns, 0);
    std::deque<std::pair<std::size_t, int>> work;
    for (int s : after) {
      if (nfa.accepting(s)) result.emplace(u, u);
      seen[key(ui, s)] = 1;
      work.emplace_back(ui, s);
    }
    while (!work.empty()) {
      auto [vi, s] = work.front();
      work.pop_front();
      for (VertexId w : g.out_neighbors(verts[vi])) {
        std::set<int> next = nfa.step({s}, g.label_name(g.label_of(w)));
        std::size_t wi = vidx.at(w);
        for (int t : next) {
          if (seen[key(wi, t)]) continue;
          seen[key(wi, t)] = 1;
          if (nfa.accepting(t)) result.emplace(u, w);
          work.emplace_back(wi, t);
        }
      }
    }
  }
  return result;
}

}  // namespace repath
