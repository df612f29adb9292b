#include "repath/plan.hpp"

#include <algorithm>

namespace repath {

namespace {

std::vector<OccId> sorted_unique(std::vector<OccId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<OccId> merged(const std::vector<OccId>& a, const std::vector<OccId>& b) {
  std::vector<OccId> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return sorted_unique(std::move(out));
}

std::vector<OccId> set_to_vec(const std::set<OccId>& s) { return {s.begin(), s.end()}; }

const char* kind_name(PhysicalOp::Kind k) {
  switch (k) {
    case PhysicalOp::Kind::Load: return "Load";
    case PhysicalOp::Kind::Neighbor: return "Neighbor";
    case PhysicalOp::Kind::SingleLink: return "SingleLink";
    case PhysicalOp::Kind::DoubleLink: return "DoubleLink";
    case PhysicalOp::Kind::ClosureLink: return "ClosureLink";
    case PhysicalOp::Kind::SelfLink: return "SelfLink";
  }
  return "?";
}

PhysicalOp link_op(PhysicalOp::Kind k, std::vector<OccId> a, std::vector<OccId> b,
                   std::vector<OccId> c, std::vector<OccId> d) {
  PhysicalOp op;
  op.kind = k;
  op.a = std::move(a);
  op.b = std::move(b);
  op.c = std::move(c);
  op.d = std::move(d);
  return op;
}

}  // namespace

std::string PhysicalOp::to_string(const OccTable& occs) const {
  std::string out = kind_name(kind);
  out += "(";
  bool first = true;
  for (const auto* s : {&a, &b, &c, &d}) {
    if (s->empty()) continue;
    if (!first) out += ", ";
    out += occs.set_to_string(*s);
    first = false;
  }
  out += ")";
  if (kind == PhysicalOp::Kind::ClosureLink && step == ClosureStep::LinkStep) out += " via-links";
  out += dir == Direction::Forward ? " dir=>" : " dir=<";
  return out;
}

std::string PhysicalPlan::to_string(const OccTable& occs) const {
  std::string out;
  for (const auto& op : ops) {
    out += op.to_string(occs);
    out += "\n";
  }
  return out;
}

PhysicalOp PlanComposer::make_load(std::vector<OccId> occs) {
  // A wildcard load materializes every vertex; the optimizer avoids it
  // through its n-sized cost, and Neighbor never loads a `#` frontier.
  PhysicalOp op;
  op.kind = PhysicalOp::Kind::Load;
  op.a = sorted_unique(std::move(occs));
  note_self_pairs(op.a, op);
  return op;
}

void PlanComposer::note_self_pairs(const std::vector<OccId>& occs, PhysicalOp& op) {
  for (OccId o : occs) {
    if (!plan_->self_paired.count(o)) continue;
    if (state_.materialized.count(o)) continue;
    op.self_pairs.push_back(o);
    state_.tails_of[o].insert(o);
    state_.heads_of[o].insert(o);
  }
}

// Joins occurrence sets X -> Y against the current region, assuming the op
// just produced direct X<->Y links. Emits the SingleLink/DoubleLink
// compositions that keep far anchors directly linked, updates the boundary
// pairs, and consumes the X right ports and Y left ports. Returns the anchor
// filter directives for the touched boundary classes.
std::vector<std::pair<OccId, std::vector<OccId>>> PlanComposer::compose_attach(
    const std::vector<OccId>& X, const std::vector<OccId>& Y, std::vector<PhysicalOp>& out) {
  auto& tails_of = state_.tails_of;
  auto& heads_of = state_.heads_of;

  std::vector<OccId> Xc, Xdirect, Yc, Yrest;
  std::set<OccId> H_far, T_far;
  for (OccId x : X) {
    auto it = heads_of.find(x);
    if (it != heads_of.end() && !it->second.empty()) {
      Xc.push_back(x);
      H_far.insert(it->second.begin(), it->second.end());
    } else {
      Xdirect.push_back(x);
    }
  }
  for (OccId y : Y) {
    auto it = tails_of.find(y);
    if (it != tails_of.end() && !it->second.empty()) {
      Yc.push_back(y);
      T_far.insert(it->second.begin(), it->second.end());
    } else {
      Yrest.push_back(y);
    }
  }

  auto add_pairs = [&](const std::vector<OccId>& hs, const std::vector<OccId>& ts) {
    for (OccId h : hs)
      for (OccId t : ts) {
        tails_of[h].insert(t);
        heads_of[t].insert(h);
      }
  };

  std::vector<OccId> Hfar = set_to_vec(H_far), Tfar = set_to_vec(T_far);
  std::set<OccId> touched_heads(Xdirect.begin(), Xdirect.end());
  std::set<OccId> touched_tails(Yrest.begin(), Yrest.end());

  if (!Xc.empty() && !Yrest.empty()) {
    out.push_back(link_op(PhysicalOp::Kind::SingleLink, Hfar, Xc, Yrest, {}));
    add_pairs(Hfar, Yrest);
    touched_heads.insert(Hfar.begin(), Hfar.end());
  }
  if (!Xc.empty() && !Yc.empty()) {
    out.push_back(link_op(PhysicalOp::Kind::DoubleLink, Hfar, Xc, Yc, Tfar));
    add_pairs(Hfar, Tfar);
    touched_heads.insert(Hfar.begin(), Hfar.end());
    touched_tails.insert(Tfar.begin(), Tfar.end());
  }
  if (!Xdirect.empty() && !Yc.empty()) {
    out.push_back(link_op(PhysicalOp::Kind::SingleLink, Xdirect, Yc, Tfar, {}));
    add_pairs(Xdirect, Tfar);
    touched_tails.insert(Tfar.begin(), Tfar.end());
  }
  add_pairs(Xdirect, Yrest);

  // this operator consumed the right ports of X and the left ports of Y;
  // an occurrence on both sides (shared closure boundary) keeps its ports
  std::set<OccId> yset(Y.begin(), Y.end()), xset(X.begin(), X.end());
  for (OccId x : X) {
    if (yset.count(x)) continue;
    if (auto it = heads_of.find(x); it != heads_of.end()) {
      for (OccId h : it->second)
        if (auto t = tails_of.find(h); t != tails_of.end()) t->second.erase(x);
      heads_of.erase(it);
    }
  }
  for (OccId y : Y) {
    if (xset.count(y)) continue;
    if (auto it = tails_of.find(y); it != tails_of.end()) {
      for (OccId t : it->second)
        if (auto h = heads_of.find(t); h != heads_of.end()) h->second.erase(y);
      tails_of.erase(it);
    }
  }

  // anchors must keep a link into at least one open partner class; a
  // self-paired occurrence plays head and tail at once and is never filtered
  std::vector<std::pair<OccId, std::vector<OccId>>> anchor_filters;
  for (OccId h : touched_heads) {
    if (plan_->self_paired.count(h)) continue;
    auto it = tails_of.find(h);
    if (it != tails_of.end() && !it->second.empty())
      anchor_filters.emplace_back(h, set_to_vec(it->second));
  }
  for (OccId t : touched_tails) {
    if (plan_->self_paired.count(t)) continue;
    auto it = heads_of.find(t);
    if (it != heads_of.end() && !it->second.empty())
      anchor_filters.emplace_back(t, set_to_vec(it->second));
  }
  return anchor_filters;
}

std::vector<PhysicalOp> PlanComposer::lower_concat(const LogicalOp& op, Direction dir) {
  std::vector<PhysicalOp> out;
  std::vector<OccId> X = sorted_unique(op.left), Y = sorted_unique(op.right);

  std::vector<OccId> Xf, Ym;
  for (OccId x : X)
    if (!state_.materialized.count(x)) Xf.push_back(x);
  std::vector<OccId> Yf;
  for (OccId y : Y) {
    if (state_.materialized.count(y))
      Ym.push_back(y);
    else
      Yf.push_back(y);
  }

  PhysicalOp nb;
  nb.kind = PhysicalOp::Kind::Neighbor;
  nb.dir = dir;
  if (dir == Direction::Forward) {
    if (!Xf.empty()) out.push_back(make_load(Xf));
    nb.a = X;
    nb.b = Y;
    nb.intersect = Ym;
  } else {
    std::vector<OccId> Xm;
    for (OccId x : X)
      if (state_.materialized.count(x)) Xm.push_back(x);
    if (!Yf.empty()) out.push_back(make_load(Yf));
    nb.a = Y;
    nb.b = X;
    nb.intersect = Xm;
  }
  note_self_pairs(X, nb);
  note_self_pairs(Y, nb);
  for (OccId y : Y)
    if (!plan_->self_paired.count(y)) nb.filters.emplace_back(y, X);
  for (OccId x : X)
    if (!plan_->self_paired.count(x)) nb.filters.emplace_back(x, Y);
  out.push_back(std::move(nb));

  state_.materialized.insert(X.begin(), X.end());
  state_.materialized.insert(Y.begin(), Y.end());

  std::vector<PhysicalOp> attach;
  auto anchor_filters = compose_attach(X, Y, attach);
  for (auto& a : attach) out.push_back(std::move(a));
  out.back().filters.insert(out.back().filters.end(), anchor_filters.begin(), anchor_filters.end());
  return out;
}

std::vector<PhysicalOp> PlanComposer::lower_closure(const LogicalOp& op, Direction dir) {
  std::vector<PhysicalOp> out;
  std::vector<OccId> A = sorted_unique(op.head), T = sorted_unique(op.tail);

  bool a_seeded = std::any_of(A.begin(), A.end(),
                              [&](OccId o) { return state_.materialized.count(o) > 0; });
  bool t_seeded = std::any_of(T.begin(), T.end(),
                              [&](OccId o) { return state_.materialized.count(o) > 0; });

  PhysicalOp cl;
  cl.kind = PhysicalOp::Kind::ClosureLink;
  cl.dir = dir;
  cl.a = A;
  cl.b = T;

  switch (op.body) {
    case LogicalOp::BodyShape::Symbols: {
      cl.step = PhysicalOp::ClosureStep::SymbolStep;
      bool need_full = (dir == Direction::Forward && !a_seeded) ||
                       (dir == Direction::Backward && !t_seeded);
      PhysicalOp self;
      self.kind = PhysicalOp::Kind::SelfLink;
      self.b = A;
      self.c = T;
      if (need_full) {
        out.push_back(make_load(sorted_unique(op.base)));
        self.a = sorted_unique(op.base);
        if (a_seeded) self.a = merged(self.a, A);
        if (t_seeded) self.a = merged(self.a, T);
      } else if (a_seeded && t_seeded) {
        self.a = merged(A, T);
      } else if (a_seeded) {
        self.a = A;
      } else {
        self.a = T;
      }
      out.push_back(std::move(self));
      break;
    }
    case LogicalOp::BodyShape::Edge: {
      cl.step = PhysicalOp::ClosureStep::GraphStep;
      if (dir == Direction::Forward && !a_seeded) out.push_back(make_load(A));
      if (dir == Direction::Backward && !t_seeded) out.push_back(make_load(T));
      break;
    }
    case LogicalOp::BodyShape::Composite: {
      cl.step = PhysicalOp::ClosureStep::LinkStep;
      // the body runs standalone; the closure then alternates body boundary
      // links with graph re-entry edges
      PlanComposer inner(*plan_);
      for (const auto& iop : op.inner) inner.apply_op(iop, iop.exec_dir);
      // single-symbol body branches have no inner operator; load them fully
      // so the closure walk can pass through, even when an outer operator
      // already materialized a slice of the class
      std::vector<OccId> bare;
      for (OccId o : merged(A, T))
        if (!inner.state_.materialized.count(o)) bare.push_back(o);
      if (!bare.empty()) {
        PhysicalOp load;
        load.kind = PhysicalOp::Kind::Load;
        load.a = bare;
        for (OccId o : bare) {
          if (!plan_->self_paired.count(o)) continue;
          load.self_pairs.push_back(o);
          state_.tails_of[o].insert(o);
          state_.heads_of[o].insert(o);
        }
        inner.emitted_.push_back(load);
      }
      for (auto& p : inner.emitted_) out.push_back(std::move(p));
      break;
    }
  }

  for (OccId a : A)
    if (!plan_->self_paired.count(a)) cl.filters.emplace_back(a, T);
  for (OccId t : T)
    if (!plan_->self_paired.count(t)) cl.filters.emplace_back(t, A);
  out.push_back(std::move(cl));

  state_.materialized.insert(A.begin(), A.end());
  state_.materialized.insert(T.begin(), T.end());
  for (OccId b : op.base) state_.materialized.insert(b);

  std::vector<PhysicalOp> attach;
  auto anchor_filters = compose_attach(A, T, attach);
  for (auto& a : attach) out.push_back(std::move(a));
  out.back().filters.insert(out.back().filters.end(), anchor_filters.begin(), anchor_filters.end());
  return out;
}

std::vector<PhysicalOp> PlanComposer::apply_op(const LogicalOp& op, Direction dir) {
  std::vector<PhysicalOp> emitted = op.kind == LogicalOp::Kind::Concat ? lower_concat(op, dir)
                                                                       : lower_closure(op, dir);
  for (const auto& p : emitted) emitted_.push_back(p);
  return emitted;
}

std::vector<PhysicalOp> PlanComposer::apply(int index, Direction dir) {
  auto emitted = apply_op(plan_->ops[index], dir);
  order_.emplace_back(index, dir);
  return emitted;
}

PhysicalPlan PlanComposer::finish() {
  // single-symbol branches no operator touches still need loading
  std::vector<OccId> untouched;
  for (OccId o : plan_->self_paired)
    if (!state_.materialized.count(o)) untouched.push_back(o);
  if (!untouched.empty()) {
    PhysicalOp load;
    load.kind = PhysicalOp::Kind::Load;
    load.a = sorted_unique(std::move(untouched));
    for (OccId o : load.a) {
      load.self_pairs.push_back(o);
      state_.materialized.insert(o);
      state_.tails_of[o].insert(o);
      state_.heads_of[o].insert(o);
    }
    emitted_.push_back(std::move(load));
  }

  PhysicalPlan plan;
  plan.ops = std::move(emitted_);
  plan.order = std::move(order_);
  for (OccId h : plan_->query_heads) {
    auto it = state_.tails_of.find(h);
    if (it == state_.tails_of.end()) continue;
    for (OccId t : it->second)
      if (plan_->query_tails.count(t)) plan.answer_classes.emplace_back(h, t);
  }
  std::sort(plan.answer_classes.begin(), plan.answer_classes.end());
  return plan;
}

namespace {

const std::vector<OccId>& left_side(const LogicalOp& op) {
  return op.kind == LogicalOp::Kind::Concat ? op.left : op.head;
}

// Left-to-right reading order: repeatedly take the operator whose left side
// is available (query head or already materialized), leftmost first.
std::vector<int> reading_order(const std::vector<LogicalOp>& ops, const std::set<OccId>& heads) {
  std::set<OccId> have(heads.begin(), heads.end());
  std::vector<int> order;
  std::set<int> remaining;
  for (int i = 0; i < static_cast<int>(ops.size()); ++i) remaining.insert(i);
  while (!remaining.empty()) {
    int best = -1;
    OccId best_occ = kNoOcc;
    for (int i : remaining) {
      const auto& ls = left_side(ops[i]);
      bool ready = std::all_of(ls.begin(), ls.end(), [&](OccId o) { return have.count(o) > 0; });
      if (!ready) continue;
      OccId lo = *std::min_element(ls.begin(), ls.end());
      if (best == -1 || lo < best_occ) {
        best = i;
        best_occ = lo;
      }
    }
    if (best == -1) best = *remaining.begin();  // defensive: disconnected piece
    order.push_back(best);
    remaining.erase(best);
    const auto& op = ops[best];
    if (op.kind == LogicalOp::Kind::Concat) {
      have.insert(op.left.begin(), op.left.end());
      have.insert(op.right.begin(), op.right.end());
    } else {
      have.insert(op.head.begin(), op.head.end());
      have.insert(op.tail.begin(), op.tail.end());
    }
  }
  return order;
}

void order_inner_bodies(std::vector<LogicalOp>& ops) {
  for (auto& op : ops) {
    if (op.kind != LogicalOp::Kind::Closure || op.body != LogicalOp::BodyShape::Composite) continue;
    order_inner_bodies(op.inner);
    std::set<OccId> heads(op.head.begin(), op.head.end());
    std::vector<int> order = reading_order(op.inner, heads);
    std::vector<LogicalOp> reordered;
    for (int i : order) reordered.push_back(std::move(op.inner[i]));
    op.inner = std::move(reordered);
  }
}

}  // namespace

PhysicalPlan default_plan(const LogicalPlan& plan) {
  LogicalPlan ordered = plan;
  order_inner_bodies(ordered.ops);
  PlanComposer c(ordered);
  for (int i : reading_order(ordered.ops, ordered.query_heads)) c.apply(i, Direction::Forward);
  return c.finish();
}

PhysicalPlan lower_plan(const LogicalPlan& plan,
                        const std::vector<std::pair<int, Direction>>& order) {
  PlanComposer c(plan);
  for (auto [i, d] : order) c.apply(i, d);
  return c.finish();
}

}  // namespace repath
