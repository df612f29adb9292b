#include "repath/exec.hpp"

#include <algorithm>
#include <memory>

namespace repath {

ExecContext::ExecContext(const LabeledGraph& graph, const OccTable& occs) : g(&graph) {
  occ_label.resize(occs.size());
  for (OccId o = 0; o < occs.size(); ++o) {
    occ_label[o] = occs.wildcard(o) ? kWildcardLabel : graph.find_label(occs.symbol(o));
  }
}

void op_load(ExecContext& cx, const std::vector<OccId>& occs) {
  for (OccId o : occs) {
    LabelId l = cx.label(o);
    if (l == kInvalidLabel) continue;  // symbol absent from the graph: empty set
    if (l == kWildcardLabel) {
      for (VertexId v : cx.g->all_vertices()) {
        cx.ws.ensure(o, v);
        ++cx.touches;
      }
      continue;
    }
    for (std::uint32_t p = 0; p < cx.g->partition_count(); ++p) {
      for (VertexId v : cx.g->vertices_with_label(p, l)) {
        cx.ws.ensure(o, v);
        ++cx.touches;
      }
    }
  }
}

void op_self_link(ExecContext& cx, const std::vector<OccId>& src,
                  const std::vector<OccId>& head_copies, const std::vector<OccId>& tail_copies) {
  // match copies to source stubs by label
  auto pick = [&](const std::vector<OccId>& copies, LabelId l) -> OccId {
    for (OccId c : copies)
      if (cx.label(c) == l || cx.label(c) == kWildcardLabel) return c;
    return kNoOcc;
  };
  for (OccId s : src) {
    std::vector<VertexId> verts;
    for (const auto& [v, stub] : cx.ws.set_of(s)) verts.push_back(v);
    for (VertexId v : verts) {
      LabelId lv = cx.g->label_of(v);
      OccId h = pick(head_copies, lv);
      OccId t = pick(tail_copies, lv);
      if (h == kNoOcc || t == kNoOcc) continue;
      cx.ws.link(h, v, t, v);
      ++cx.touches;
    }
  }
  for (OccId h : head_copies)
    for (OccId t : tail_copies) cx.ws.register_link_class(h, t);
}

void op_neighbor(ExecContext& cx, const std::vector<OccId>& src, const std::vector<OccId>& dst,
                 Direction dir, const std::vector<OccId>& intersect) {
  // `intersect` is planner context only: stubs landing outside an already
  // materialized class carry no region links, so the later compositions and
  // filters exclude them without an ownership check here. The distributed
  // engine relies on the same behavior.
  (void)intersect;
  for (OccId s : src) {
    std::vector<VertexId> verts;
    for (const auto& [v, stub] : cx.ws.set_of(s)) verts.push_back(v);
    for (VertexId v : verts) {
      auto nbrs = cx.g->neighbors(v, dir);
      cx.touches += nbrs.size();
      for (VertexId u : nbrs) {
        LabelId lu = cx.g->label_of(u);
        for (OccId d : dst) {
          LabelId ld = cx.label(d);
          if (ld == kInvalidLabel) continue;
          if (ld != kWildcardLabel && ld != lu) continue;
          // links are stored in expression orientation regardless of the
          // walk direction
          if (dir == Direction::Forward)
            cx.ws.link(s, v, d, u);
          else
            cx.ws.link(d, u, s, v);
          ++cx.touches;
        }
      }
    }
  }
  for (OccId s : src)
    for (OccId d : dst) cx.ws.register_link_class(s, d);
}

namespace {

void require_class(const ExecContext& cx, const std::vector<OccId>& from,
                   const std::vector<OccId>& to, const char* what) {
  bool any_stub = false;
  for (OccId o : from) any_stub = any_stub || cx.ws.size_of(o) > 0;
  if (!any_stub) return;
  for (OccId a : from)
    for (OccId b : to)
      if (cx.ws.link_class_built(a, b)) return;
  throw MissingLinkClassError(std::string("MissingLinkClass: ") + what);
}

}  // namespace

void op_single_link(ExecContext& cx, const std::vector<OccId>& a, const std::vector<OccId>& b,
                    const std::vector<OccId>& c) {
  require_class(cx, a, b, "a-b links were never built");
  require_class(cx, b, c, "b-c links were never built");
  for (OccId ao : a) {
    std::vector<VertexId> verts;
    for (const auto& [v, stub] : cx.ws.set_of(ao)) verts.push_back(v);
    for (VertexId x : verts) {
      const Stub* xs = cx.ws.find(ao, x);
      if (!xs) continue;
      std::vector<std::pair<OccId, VertexId>> m;
      for (OccId bo : b) {
        auto it = xs->out.find(bo);
        if (it == xs->out.end()) continue;
        for (VertexId v : it->second) {
          m.emplace_back(bo, v);
          ++cx.touches;
        }
      }
      for (auto [bo, v] : m) {
        const Stub* bs = cx.ws.find(bo, v);
        if (!bs) continue;
        for (OccId co : c) {
          auto it = bs->out.find(co);
          if (it == bs->out.end()) continue;
          for (VertexId u : it->second) {
            cx.ws.link(ao, x, co, u);
            ++cx.touches;
          }
        }
      }
    }
  }
  for (OccId ao : a)
    for (OccId co : c) cx.ws.register_link_class(ao, co);
}

void op_double_link(ExecContext& cx, const std::vector<OccId>& a, const std::vector<OccId>& b,
                    const std::vector<OccId>& c, const std::vector<OccId>& d) {
  require_class(cx, a, b, "a-b links were never built");
  require_class(cx, b, c, "b-c links were never built");
  require_class(cx, c, d, "c-d links were never built");
  for (OccId ao : a) {
    std::vector<VertexId> verts;
    for (const auto& [v, stub] : cx.ws.set_of(ao)) verts.push_back(v);
    for (VertexId x : verts) {
      const Stub* xs = cx.ws.find(ao, x);
      if (!xs) continue;
      std::vector<std::pair<OccId, VertexId>> m;
      for (OccId bo : b) {
        auto it = xs->out.find(bo);
        if (it == xs->out.end()) continue;
        for (VertexId v : it->second) {
          m.emplace_back(bo, v);
          ++cx.touches;
        }
      }
      std::set<std::pair<OccId, VertexId>> h;
      for (auto [bo, v] : m) {
        const Stub* bs = cx.ws.find(bo, v);
        if (!bs) continue;
        for (OccId co : c) {
          auto it = bs->out.find(co);
          if (it == bs->out.end()) continue;
          for (VertexId u : it->second) {
            h.emplace(co, u);
            ++cx.touches;
          }
        }
      }
      for (auto [co, u] : h) {
        const Stub* csb = cx.ws.find(co, u);
        if (!csb) continue;
        for (OccId dd : d) {
          auto it = csb->out.find(dd);
          if (it == csb->out.end()) continue;
          for (VertexId w : it->second) {
            cx.ws.link(ao, x, dd, w);
            ++cx.touches;
          }
        }
      }
    }
  }
  for (OccId ao : a)
    for (OccId dd : d) cx.ws.register_link_class(ao, dd);
}

namespace {

// The alternating closure walk. Nodes are (occurrence, vertex) on the `from`
// side; hits are (occurrence, vertex) on the `to` side reached by one step;
// node successors are the from-side continuations behind each hit. Iterative
// Tarjan so strongly connected segments pool their descendant sets; every
// node is expanded exactly once.
struct ClosureWalk {
  using Node = std::pair<OccId, VertexId>;
  using Hit = std::pair<OccId, VertexId>;
  using HitSet = std::set<Hit>;

  ExecContext& cx;
  std::vector<OccId> from_occs, to_occs;
  Direction edge_dir = Direction::Forward;
  PhysicalOp::ClosureStep step = PhysicalOp::ClosureStep::GraphStep;
  std::map<std::pair<OccId, VertexId>, int>* expansions = nullptr;

  std::map<Node, std::pair<std::vector<Hit>, std::vector<Node>>> expanded{};
  std::map<Hit, std::vector<Node>> to_expanded{};
  std::map<Node, std::shared_ptr<HitSet>> result{};

  // every occurrence of the set a vertex with label l can stand for
  std::vector<OccId> occs_for(const std::vector<OccId>& occs, LabelId l) const {
    std::vector<OccId> out;
    for (OccId o : occs)
      if (cx.label(o) == l || cx.label(o) == kWildcardLabel) out.push_back(o);
    return out;
  }

  // the from-side continuations behind one to-side hit, expanded once
  const std::vector<Node>& expand_hit(const Hit& h) {
    auto it = to_expanded.find(h);
    if (it != to_expanded.end()) return it->second;
    std::set<Node> nexts;
    if (step == PhysicalOp::ClosureStep::SymbolStep) {
      // a hit vertex is itself the next one-vertex iteration
      for (OccId o : occs_for(from_occs, cx.g->label_of(h.second))) nexts.emplace(o, h.second);
    } else {
      if (expansions) ++(*expansions)[h];
      auto nbrs = cx.g->neighbors(h.second, edge_dir);
      cx.touches += nbrs.size();
      for (VertexId w : nbrs) {
        for (OccId o : occs_for(from_occs, cx.g->label_of(w))) {
          if (step == PhysicalOp::ClosureStep::LinkStep && !cx.ws.has(o, w)) continue;
          nexts.emplace(o, w);
        }
      }
    }
    return to_expanded.emplace(h, std::vector<Node>(nexts.begin(), nexts.end())).first->second;
  }

  // one alternation step from a from-side node: to-side hits, then the
  // from-side nodes reachable behind them
  const std::pair<std::vector<Hit>, std::vector<Node>>& expand(const Node& n) {
    auto it = expanded.find(n);
    if (it != expanded.end()) return it->second;
    if (expansions) ++(*expansions)[n];

    std::pair<std::vector<Hit>, std::vector<Node>> out;
    std::set<Hit> hits;
    if (step != PhysicalOp::ClosureStep::LinkStep) {
      auto nbrs = cx.g->neighbors(n.second, edge_dir);
      cx.touches += nbrs.size();
      for (VertexId u : nbrs)
        for (OccId o : occs_for(to_occs, cx.g->label_of(u))) hits.emplace(o, u);
    } else {
      // body boundary links: head-side nodes follow out, tail-side nodes in
      if (const Stub* s = cx.ws.find(n.first, n.second)) {
        const auto& table = edge_dir == Direction::Forward ? s->out : s->in;
        for (OccId o : to_occs) {
          auto l = table.find(o);
          if (l == table.end()) continue;
          for (VertexId u : l->second) {
            hits.emplace(o, u);
            ++cx.touches;
          }
        }
      }
    }
    std::set<Node> nexts;
    for (const auto& h : hits) {
      const auto& nn = expand_hit(h);
      nexts.insert(nn.begin(), nn.end());
    }
    out.first.assign(hits.begin(), hits.end());
    out.second.assign(nexts.begin(), nexts.end());
    return expanded.emplace(n, std::move(out)).first->second;
  }

  /// Tarjan from every seed; fills `result` with the full descendant set of
  /// every node touched (seeds and interior discoveries alike).
  void run(const std::vector<Node>& seeds) {
    std::map<Node, int> index, low;
    std::set<Node> on_stack;
    std::vector<Node> scc_stack;
    int counter = 0;

    struct Frame {
      Node node;
      std::size_t next_child = 0;
    };

    for (const Node& seed : seeds) {
      if (index.count(seed)) continue;
      std::vector<Frame> call;
      call.push_back({seed, 0});
      index[seed] = low[seed] = counter++;
      scc_stack.push_back(seed);
      on_stack.insert(seed);
      result[seed] = std::make_shared<HitSet>();

      while (!call.empty()) {
        Frame& f = call.back();
        const auto& ex = expand(f.node);
        if (f.next_child == 0) {
          result[f.node]->insert(ex.first.begin(), ex.first.end());
        }
        if (f.next_child < ex.second.size()) {
          Node child = ex.second[f.next_child++];
          auto ci = index.find(child);
          if (ci == index.end()) {
            index[child] = low[child] = counter++;
            scc_stack.push_back(child);
            on_stack.insert(child);
            result[child] = std::make_shared<HitSet>();
            call.push_back({child, 0});
          } else if (on_stack.count(child)) {
            low[f.node] = std::min(low[f.node], ci->second);
          } else {
            auto& mine = result[f.node];
            const auto& theirs = result[child];
            mine->insert(theirs->begin(), theirs->end());
          }
          continue;
        }
        // node finished
        Node done = f.node;
        call.pop_back();
        if (!call.empty()) {
          Node parent = call.back().node;
          low[parent] = std::min(low[parent], low[done]);
        }
        if (low[done] == index[done]) {
          // pool the SCC: all members share one descendant set
          std::vector<Node> members;
          while (true) {
            Node m = scc_stack.back();
            scc_stack.pop_back();
            on_stack.erase(m);
            members.push_back(m);
            if (m == done) break;
          }
          auto pooled = std::make_shared<HitSet>();
          for (const Node& m : members) pooled->insert(result[m]->begin(), result[m]->end());
          for (const Node& m : members) result[m] = pooled;
        }
        if (!call.empty()) {
          Node parent = call.back().node;
          result[parent]->insert(result[done]->begin(), result[done]->end());
        }
      }
    }
  }
};

}  // namespace

void op_closure_link(ExecContext& cx, const std::vector<OccId>& head, const std::vector<OccId>& tail,
                     Direction dir, PhysicalOp::ClosureStep step) {
  bool forward = dir == Direction::Forward;
  ClosureWalk walk{.cx = cx,
                   .from_occs = forward ? head : tail,
                   .to_occs = forward ? tail : head,
                   .edge_dir = dir,
                   .step = step};
  if (cx.instrument_closures) {
    cx.closure_expansions.emplace_back();
    walk.expansions = &cx.closure_expansions.back();
  }

  std::vector<ClosureWalk::Node> seeds;
  for (OccId o : walk.from_occs)
    for (const auto& [v, stub] : cx.ws.set_of(o)) seeds.emplace_back(o, v);
  walk.run(seeds);

  for (const auto& [node, hits] : walk.result) {
    for (const auto& [ho, hv] : *hits) {
      if (forward)
        cx.ws.link(node.first, node.second, ho, hv);
      else
        cx.ws.link(ho, hv, node.first, node.second);
      ++cx.touches;
    }
  }
  for (OccId a : head)
    for (OccId t : tail) cx.ws.register_link_class(a, t);
}

void run_physical(ExecContext& cx, const PhysicalOp& op) {
  switch (op.kind) {
    case PhysicalOp::Kind::Load: op_load(cx, op.a); break;
    case PhysicalOp::Kind::SelfLink: op_self_link(cx, op.a, op.b, op.c); break;
    case PhysicalOp::Kind::Neighbor: op_neighbor(cx, op.a, op.b, op.dir, op.intersect); break;
    case PhysicalOp::Kind::SingleLink: op_single_link(cx, op.a, op.b, op.c); break;
    case PhysicalOp::Kind::DoubleLink: op_double_link(cx, op.a, op.b, op.c, op.d); break;
    case PhysicalOp::Kind::ClosureLink: op_closure_link(cx, op.a, op.b, op.dir, op.step); break;
  }
  for (OccId o : op.self_pairs) {
    // bookkeeping pairs over stubs counted by the op itself
    std::vector<VertexId> verts;
    for (const auto& [v, stub] : cx.ws.set_of(o)) verts.push_back(v);
    for (VertexId v : verts) cx.ws.link(o, v, o, v);
  }
  for (const auto& [occ, required] : op.filters) cx.ws.filter(occ, required);
}

std::set<std::pair<VertexId, VertexId>> extract_pairs(const Workspace& ws, const PhysicalPlan& plan) {
  std::set<std::pair<VertexId, VertexId>> out;
  for (auto [h, t] : plan.answer_classes) {
    auto links = ws.links_between(h, t);
    out.insert(links.begin(), links.end());
  }
  return out;
}

QueryRun execute_plan(const LabeledGraph& g, const OccTable& occs, const PhysicalPlan& plan,
                      bool instrument,
                      std::vector<std::map<std::pair<OccId, VertexId>, int>>* expansions) {
  ExecContext cx(g, occs);
  cx.instrument_closures = instrument;
  for (const auto& op : plan.ops) run_physical(cx, op);
  QueryRun run;
  run.pairs = extract_pairs(cx.ws, plan);
  run.touches = cx.touches;
  if (expansions) *expansions = std::move(cx.closure_expansions);
  return run;
}

}  // namespace repath
