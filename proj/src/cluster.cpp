#include "repath/cluster.hpp"

#include <algorithm>
#include <ostream>

namespace repath {

Cluster::Cluster(const LabeledGraph& g, const OccTable& occs) : g_(&g) {
  occ_label_.resize(occs.size());
  for (OccId o = 0; o < occs.size(); ++o)
    occ_label_[o] = occs.wildcard(o) ? kWildcardLabel : g.find_label(occs.symbol(o));
  shards_.resize(g.partition_count());
  for (std::uint32_t w = 0; w < g.partition_count(); ++w) shards_[w].id = w;
}

void Cluster::log_message(std::uint32_t src, std::uint32_t dst, const char* primitive,
                          std::size_t records) {
  log_.push_back({round_, src, dst, primitive, records, invocation_});
}

std::vector<LinkRecord> Cluster::answer_requests(std::uint32_t owner,
                                                 const std::vector<NeighborRequest>& reqs) {
  std::vector<LinkRecord> out;
  const Shard& shard = shards_[owner];
  for (const NeighborRequest& r : reqs) {
    if (r.id.partition() != owner) throw std::logic_error("request routed to wrong worker");
    if (!g_->has_vertex(r.id))
      throw UnknownVertexError("UnknownVertex: " + std::to_string(r.id.packed));
    if (r.source == NeighborRequest::Source::Adjacency) {
      LabelId want = label(r.r2);
      if (want == kInvalidLabel) continue;
      auto nbrs = g_->neighbors(r.id, r.dir);
      touches_ += nbrs.size();
      for (VertexId u : nbrs) {
        if (want != kWildcardLabel && g_->label_of(u) != want) continue;
        // membership is owner-local state; a remote id passes through and
        // dead-ends at its owner on the next hop instead
        if (r.existing_only && u.partition() == owner && !shard.ws.has(r.r2, u)) continue;
        out.push_back({r.id, r.r1, u, r.r2});
      }
    } else {
      const Stub* s = shard.ws.find(r.r1, r.id);
      if (!s) continue;
      const auto& table = r.dir == Direction::Forward ? s->out : s->in;
      auto it = table.find(r.r2);
      if (it == table.end()) continue;
      touches_ += it->second.size();
      for (VertexId u : it->second) out.push_back({r.id, r.r1, u, r.r2});
    }
  }
  return out;
}

std::vector<LinkRecord> Cluster::batch_get_neighbor(const std::vector<NeighborRequest>& reqs,
                                                    std::uint32_t src) {
  ++invocation_;
  std::map<std::uint32_t, std::vector<NeighborRequest>> by_owner;
  for (const NeighborRequest& r : reqs) {
    if (r.id.partition() >= worker_count()) throw UnknownVertexError("UnknownVertex: bad partition");
    by_owner[r.id.partition()].push_back(r);
  }
  std::vector<LinkRecord> replies;
  std::size_t expected_groups = 0, answered_groups = 0;
  for (auto& [owner, group] : by_owner) {
    std::sort(group.begin(), group.end());
    group.erase(std::unique(group.begin(), group.end()), group.end());
    ++expected_groups;
    if (owner != src) {
      if (drop_next_) {
        drop_next_ = false;
        continue;  // message lost in transit
      }
      log_message(src, owner, "GetNeighbor", group.size());
    }
    auto rows = answer_requests(owner, group);
    if (owner != src) log_message(owner, src, "GetNeighborReply", rows.size());
    replies.insert(replies.end(), rows.begin(), rows.end());
    ++answered_groups;
  }
  if (answered_groups != expected_groups)
    throw LostMessageError("BatchGetNeighbor: a request batch went unanswered");
  return replies;
}

void Cluster::apply_links(std::uint32_t owner, const std::vector<LinkRecord>& recs) {
  Shard& shard = shards_[owner];
  for (const LinkRecord& r : recs) {
    if (r.pid.partition() == owner) {
      shard.ws.add_out(r.plabel, r.pid, r.clabel, r.cid);
      ++touches_;
    }
    if (r.cid.partition() == owner) {
      shard.ws.add_in(r.clabel, r.cid, r.plabel, r.pid);
      ++touches_;
    }
  }
}

void Cluster::batch_add_link(const std::vector<LinkRecord>& recs, std::uint32_t src) {
  ++invocation_;
  std::map<std::uint32_t, std::vector<LinkRecord>> by_owner;
  for (const LinkRecord& r : recs) {
    by_owner[r.pid.partition()].push_back(r);
    if (r.cid.partition() != r.pid.partition()) by_owner[r.cid.partition()].push_back(r);
  }
  std::size_t expected = by_owner.size(), applied = 0;
  for (auto& [owner, group] : by_owner) {
    std::sort(group.begin(), group.end());
    group.erase(std::unique(group.begin(), group.end()), group.end());
    if (owner != src) {
      if (drop_next_) {
        drop_next_ = false;
        continue;
      }
      log_message(src, owner, "AddLink", group.size());
    }
    apply_links(owner, group);
    ++applied;
  }
  if (applied != expected) throw LostMessageError("BatchAddLink: a record batch went undelivered");
}

void Cluster::dist_load(const PhysicalOp& op) {
  for (auto& shard : shards_) {
    for (OccId o : op.a) {
      LabelId l = label(o);
      if (l == kInvalidLabel) continue;
      if (l == kWildcardLabel) {
        for (VertexId v : g_->all_vertices()) {
          if (v.partition() != shard.id) continue;
          shard.ws.ensure(o, v);
          ++touches_;
        }
        continue;
      }
      for (VertexId v : g_->vertices_with_label(shard.id, l)) {
        shard.ws.ensure(o, v);
        ++touches_;
      }
    }
  }
}

void Cluster::dist_self_link(const PhysicalOp& op) {
  for (auto& shard : shards_) {
    auto pick = [&](const std::vector<OccId>& copies, LabelId l) -> OccId {
      for (OccId c : copies)
        if (label(c) == l || label(c) == kWildcardLabel) return c;
      return kNoOcc;
    };
    for (OccId s : op.a) {
      std::vector<VertexId> verts;
      for (const auto& [v, stub] : shard.ws.set_of(s)) verts.push_back(v);
      for (VertexId v : verts) {
        LabelId lv = g_->label_of(v);
        OccId h = pick(op.b, lv), t = pick(op.c, lv);
        if (h == kNoOcc || t == kNoOcc) continue;
        shard.ws.link(h, v, t, v);
        ++touches_;
      }
    }
    for (OccId h : op.b)
      for (OccId t : op.c) shard.ws.register_link_class(h, t);
  }
}

void Cluster::dist_neighbor(const PhysicalOp& op) {
  ++round_;
  // adjacency of an owned vertex is local; only link placement crosses workers
  std::vector<std::vector<LinkRecord>> outbox(worker_count());
  for (auto& shard : shards_) {
    for (OccId s : op.a) {
      for (const auto& [v, stub] : shard.ws.set_of(s)) {
        auto nbrs = g_->neighbors(v, op.dir);
        touches_ += nbrs.size();
        for (VertexId u : nbrs) {
          LabelId lu = g_->label_of(u);
          for (OccId d : op.b) {
            LabelId ld = label(d);
            if (ld == kInvalidLabel) continue;
            if (ld != kWildcardLabel && ld != lu) continue;
            if (op.dir == Direction::Forward)
              outbox[shard.id].push_back({v, s, u, d});
            else
              outbox[shard.id].push_back({u, d, v, s});
          }
        }
      }
    }
    for (OccId s : op.a)
      for (OccId d : op.b) shard.ws.register_link_class(s, d);
  }
  for (std::uint32_t w = 0; w < worker_count(); ++w)
    if (!outbox[w].empty()) batch_add_link(outbox[w], w);
}

namespace {
using AncKey = std::pair<OccId, VertexId>;
}

void Cluster::dist_single_link(const PhysicalOp& op) {
  ++round_;
  // per worker: T2 requests for the c-links of linked b nodes, plus the M
  // map keyed by (clabel, cid) back to the local a anchors
  std::vector<std::map<AncKey, std::set<AncKey>>> m(worker_count());
  std::vector<std::vector<NeighborRequest>> t2(worker_count());
  for (auto& shard : shards_) {
    for (OccId ao : op.a) {
      for (const auto& [x, stub] : shard.ws.set_of(ao)) {
        for (OccId bo : op.b) {
          auto it = stub.out.find(bo);
          if (it == stub.out.end()) continue;
          for (VertexId v : it->second) {
            ++touches_;
            m[shard.id][{bo, v}].insert({ao, x});
            for (OccId co : op.c)
              t2[shard.id].push_back({v, bo, co, Direction::Forward,
                                      NeighborRequest::Source::Links, false});
          }
        }
      }
    }
  }
  for (std::uint32_t w = 0; w < worker_count(); ++w) {
    if (t2[w].empty()) continue;
    auto r2 = batch_get_neighbor(t2[w], w);
    std::vector<LinkRecord> t3;
    for (const LinkRecord& t : r2) {
      auto anchors = m[w].find({t.plabel, t.pid});
      if (anchors == m[w].end()) continue;
      for (const auto& [ao, x] : anchors->second) t3.push_back({x, ao, t.cid, t.clabel});
    }
    if (!t3.empty()) batch_add_link(t3, w);
  }
  for (auto& shard : shards_)
    for (OccId ao : op.a)
      for (OccId co : op.c) shard.ws.register_link_class(ao, co);
}

void Cluster::dist_double_link(const PhysicalOp& op) {
  ++round_;
  std::vector<std::map<AncKey, std::set<AncKey>>> m1(worker_count()), m2(worker_count());
  std::vector<std::vector<NeighborRequest>> t2(worker_count());
  for (auto& shard : shards_) {
    for (OccId ao : op.a) {
      for (const auto& [x, stub] : shard.ws.set_of(ao)) {
        for (OccId bo : op.b) {
          auto it = stub.out.find(bo);
          if (it == stub.out.end()) continue;
          for (VertexId v : it->second) {
            ++touches_;
            m1[shard.id][{bo, v}].insert({ao, x});
            for (OccId co : op.c)
              t2[shard.id].push_back({v, bo, co, Direction::Forward,
                                      NeighborRequest::Source::Links, false});
          }
        }
      }
    }
  }
  for (std::uint32_t w = 0; w < worker_count(); ++w) {
    if (t2[w].empty()) continue;
    auto r2 = batch_get_neighbor(t2[w], w);
    std::vector<NeighborRequest> t2b;
    for (const LinkRecord& t : r2) {
      auto anchors = m1[w].find({t.plabel, t.pid});
      if (anchors == m1[w].end()) continue;
      auto& set = m2[w][{t.clabel, t.cid}];
      set.insert(anchors->second.begin(), anchors->second.end());
      for (OccId dd : op.d)
        t2b.push_back({t.cid, t.clabel, dd, Direction::Forward, NeighborRequest::Source::Links,
                       false});
    }
    if (t2b.empty()) continue;
    auto r3 = batch_get_neighbor(t2b, w);
    std::vector<LinkRecord> t3;
    for (const LinkRecord& t : r3) {
      auto anchors = m2[w].find({t.plabel, t.pid});
      if (anchors == m2[w].end()) continue;
      for (const auto& [ao, x] : anchors->second) t3.push_back({x, ao, t.cid, t.clabel});
    }
    if (!t3.empty()) batch_add_link(t3, w);
  }
  for (auto& shard : shards_)
    for (OccId ao : op.a)
      for (OccId dd : op.d) shard.ws.register_link_class(ao, dd);
}

void Cluster::dist_closure_link(const PhysicalOp& op) {
  bool forward = op.dir == Direction::Forward;
  const std::vector<OccId>& from_occs = forward ? op.a : op.b;
  const std::vector<OccId>& to_occs = forward ? op.b : op.a;

  // per-worker search state, per the (n, l, l') visited discipline: a node is
  // expanded once; later-arriving ancestors flow along the cached edges
  struct WorkerSearch {
    std::map<AncKey, std::set<AncKey>> anc_from, anc_to;   // known ancestors
    std::map<AncKey, std::set<AncKey>> delta_from, delta_to;
    std::map<AncKey, std::vector<AncKey>> edges_from, edges_to;  // cached steps
    std::set<AncKey> expanded_from, expanded_to;
  };
  std::vector<WorkerSearch> search(worker_count());

  for (auto& shard : shards_) {
    for (OccId o : from_occs) {
      for (const auto& [v, stub] : shard.ws.set_of(o)) {
        AncKey n{o, v};
        search[shard.id].delta_from[n].insert(n);  // a node is its own ancestor
      }
    }
  }

  bool active = true;
  while (active) {
    active = false;
    ++round_;

    // wave 1: expand from-side nodes (their to-side hits)
    std::vector<std::vector<NeighborRequest>> reqs(worker_count());
    for (std::uint32_t w = 0; w < worker_count(); ++w) {
      for (const auto& [n, delta] : search[w].delta_from) {
        if (search[w].expanded_from.count(n)) continue;
        for (OccId to : to_occs) {
          NeighborRequest r{n.second, n.first, to, op.dir,
                            op.step == PhysicalOp::ClosureStep::LinkStep
                                ? NeighborRequest::Source::Links
                                : NeighborRequest::Source::Adjacency,
                            false};
          reqs[w].push_back(r);
        }
      }
    }
    for (std::uint32_t w = 0; w < worker_count(); ++w) {
      if (reqs[w].empty()) continue;
      auto rows = batch_get_neighbor(reqs[w], w);
      for (const LinkRecord& t : rows)
        search[w].edges_from[{t.plabel, t.pid}].push_back({t.clabel, t.cid});
      for (const auto& r : reqs[w]) search[w].expanded_from.insert({r.r1, r.id});
    }

    // flow new ancestors across the from->to edges; emit links for new pairs
    std::vector<std::vector<LinkRecord>> links(worker_count());
    for (std::uint32_t w = 0; w < worker_count(); ++w) {
      auto deltas = std::move(search[w].delta_from);
      search[w].delta_from.clear();
      for (const auto& [n, delta] : deltas) {
        auto& known = search[w].anc_from[n];
        std::vector<AncKey> fresh;
        for (const AncKey& a : delta)
          if (known.insert(a).second) fresh.push_back(a);
        if (fresh.empty()) continue;
        for (const AncKey& hit : search[w].edges_from[n]) {
          auto& dt = search[w].delta_to[hit];
          dt.insert(fresh.begin(), fresh.end());
        }
      }
    }

    // wave 2: expand to-side nodes (their from-side continuations); for a
    // single-symbol body the hit vertex itself continues, no fetch needed
    std::vector<std::vector<NeighborRequest>> reqs2(worker_count());
    for (std::uint32_t w = 0; w < worker_count(); ++w) {
      for (const auto& [h, delta] : search[w].delta_to) {
        if (search[w].expanded_to.count(h)) continue;
        if (op.step == PhysicalOp::ClosureStep::SymbolStep) {
          for (OccId fo : from_occs) {
            LabelId lf = label(fo);
            if (lf == kWildcardLabel || lf == g_->label_of(h.second))
              search[w].edges_to[h].push_back({fo, h.second});
          }
          search[w].expanded_to.insert(h);
          continue;
        }
        for (OccId fo : from_occs) {
          reqs2[w].push_back({h.second, h.first, fo, op.dir, NeighborRequest::Source::Adjacency,
                              op.step == PhysicalOp::ClosureStep::LinkStep});
        }
      }
    }
    for (std::uint32_t w = 0; w < worker_count(); ++w) {
      if (reqs2[w].empty()) continue;
      auto rows = batch_get_neighbor(reqs2[w], w);
      for (const LinkRecord& t : rows)
        search[w].edges_to[{t.plabel, t.pid}].push_back({t.clabel, t.cid});
      for (const auto& r : reqs2[w]) search[w].expanded_to.insert({r.r1, r.id});
    }

    for (std::uint32_t w = 0; w < worker_count(); ++w) {
      auto deltas = std::move(search[w].delta_to);
      search[w].delta_to.clear();
      for (const auto& [h, delta] : deltas) {
        auto& known = search[w].anc_to[h];
        std::vector<AncKey> fresh;
        for (const AncKey& a : delta)
          if (known.insert(a).second) fresh.push_back(a);
        if (fresh.empty()) continue;
        // every new ancestor of a to-side hit gains a link to it
        for (const AncKey& a : fresh) {
          if (forward)
            links[w].push_back({a.second, a.first, h.second, h.first});
          else
            links[w].push_back({h.second, h.first, a.second, a.first});
        }
        for (const AncKey& next : search[w].edges_to[h]) {
          auto& df = search[w].delta_from[next];
          df.insert(fresh.begin(), fresh.end());
          df.insert(next);  // interior nodes become ancestors themselves
        }
      }
    }

    for (std::uint32_t w = 0; w < worker_count(); ++w) {
      if (!links[w].empty()) {
        batch_add_link(links[w], w);
        active = true;
      }
      if (!search[w].delta_from.empty()) active = true;
    }
  }

  for (auto& shard : shards_)
    for (OccId a : op.a)
      for (OccId t : op.b) shard.ws.register_link_class(a, t);
}

void Cluster::dist_filters(const PhysicalOp& op) {
  for (auto& shard : shards_) {
    for (OccId o : op.self_pairs) {
      std::vector<VertexId> verts;
      for (const auto& [v, stub] : shard.ws.set_of(o)) verts.push_back(v);
      for (VertexId v : verts) shard.ws.link(o, v, o, v);
    }
    for (const auto& [occ, required] : op.filters) shard.ws.filter(occ, required);
  }
}

void Cluster::run_op(const PhysicalOp& op) {
  switch (op.kind) {
    case PhysicalOp::Kind::Load: dist_load(op); break;
    case PhysicalOp::Kind::SelfLink: dist_self_link(op); break;
    case PhysicalOp::Kind::Neighbor: dist_neighbor(op); break;
    case PhysicalOp::Kind::SingleLink: dist_single_link(op); break;
    case PhysicalOp::Kind::DoubleLink: dist_double_link(op); break;
    case PhysicalOp::Kind::ClosureLink: dist_closure_link(op); break;
  }
  dist_filters(op);
}

void Cluster::execute(const PhysicalPlan& plan) {
  for (const auto& op : plan.ops) run_op(op);
}

Workspace Cluster::merged() const {
  Workspace out;
  for (const auto& shard : shards_) {
    for (const auto& [occ, set] : shard.ws.sets()) {
      for (const auto& [v, stub] : set) out.ensure(occ, v);
    }
  }
  // second pass: keep links whose both endpoints survived their owners'
  // filters; the out halves carry the orientation
  for (const auto& shard : shards_) {
    for (const auto& [occ, set] : shard.ws.sets()) {
      for (const auto& [v, stub] : set) {
        for (const auto& [pocc, partners] : stub.out)
          for (VertexId p : partners)
            if (out.has(pocc, p)) out.link(occ, v, pocc, p);
        for (const auto& [pocc, partners] : stub.in)
          for (VertexId p : partners)
            if (out.has(pocc, p)) out.link(pocc, p, occ, v);
      }
    }
  }
  return out;
}

void Cluster::dump_message_log(std::ostream& os) const {
  os << "round,src,dst,primitive,records\n";
  for (const auto& e : log_) {
    os << e.round << ",";
    if (e.src == kCoordinator)
      os << "coord";
    else
      os << e.src;
    os << "," << e.dst << "," << e.primitive << "," << e.records << "\n";
  }
}

}  // namespace repath
