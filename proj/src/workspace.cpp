#include "repath/workspace.hpp"

#include <sstream>

namespace repath {

namespace {
const Workspace::StubSet kEmpty;
}

Stub& Workspace::ensure(OccId occ, VertexId v) {
  auto& set = sets_[occ];
  auto it = set.find(v);
  if (it == set.end()) it = set.emplace(v, Stub{v, {}, {}}).first;
  return it->second;
}

Stub* Workspace::find(OccId occ, VertexId v) {
  auto s = sets_.find(occ);
  if (s == sets_.end()) return nullptr;
  auto it = s->second.find(v);
  return it == s->second.end() ? nullptr : &it->second;
}

const Stub* Workspace::find(OccId occ, VertexId v) const {
  auto s = sets_.find(occ);
  if (s == sets_.end()) return nullptr;
  auto it = s->second.find(v);
  return it == s->second.end() ? nullptr : &it->second;
}

const Workspace::StubSet& Workspace::set_of(OccId occ) const {
  auto s = sets_.find(occ);
  return s == sets_.end() ? kEmpty : s->second;
}

std::size_t Workspace::size_of(OccId occ) const { return set_of(occ).size(); }

void Workspace::link(OccId head_occ, VertexId head_v, OccId tail_occ, VertexId tail_v) {
  ensure(head_occ, head_v).out[tail_occ].insert(tail_v);
  ensure(tail_occ, tail_v).in[head_occ].insert(head_v);
  register_link_class(head_occ, tail_occ);
}

void Workspace::add_out(OccId occ, VertexId v, OccId tail_occ, VertexId tail_v) {
  ensure(occ, v).out[tail_occ].insert(tail_v);
  register_link_class(occ, tail_occ);
}

void Workspace::add_in(OccId occ, VertexId v, OccId head_occ, VertexId head_v) {
  ensure(occ, v).in[head_occ].insert(head_v);
  register_link_class(head_occ, occ);
}

void Workspace::register_link_class(OccId o1, OccId o2) {
  link_classes_.emplace(o1, o2);
  link_classes_.emplace(o2, o1);
}

bool Workspace::link_class_built(OccId o1, OccId o2) const {
  return link_classes_.count({o1, o2}) > 0;
}

void Workspace::remove(OccId occ, VertexId v) {
  auto s = sets_.find(occ);
  if (s == sets_.end()) return;
  auto it = s->second.find(v);
  if (it == s->second.end()) return;
  for (const auto& [pocc, partners] : it->second.out) {
    for (VertexId p : partners) {
      if (pocc == occ && p == v) continue;
      if (Stub* ps = find(pocc, p)) {
        auto l = ps->in.find(occ);
        if (l != ps->in.end()) {
          l->second.erase(v);
          if (l->second.empty()) ps->in.erase(l);
        }
      }
    }
  }
  for (const auto& [pocc, partners] : it->second.in) {
    for (VertexId p : partners) {
      if (pocc == occ && p == v) continue;
      if (Stub* ps = find(pocc, p)) {
        auto l = ps->out.find(occ);
        if (l != ps->out.end()) {
          l->second.erase(v);
          if (l->second.empty()) ps->out.erase(l);
        }
      }
    }
  }
  s->second.erase(it);
}

void Workspace::filter(OccId occ, std::span<const OccId> required) {
  auto s = sets_.find(occ);
  if (s == sets_.end()) return;
  std::vector<VertexId> doomed;
  for (const auto& [v, stub] : s->second) {
    bool ok = false;
    for (OccId r : required) {
      auto o = stub.out.find(r);
      if (o != stub.out.end() && !o->second.empty()) {
        ok = true;
        break;
      }
      auto i = stub.in.find(r);
      if (i != stub.in.end() && !i->second.empty()) {
        ok = true;
        break;
      }
    }
    if (!ok) doomed.push_back(v);
  }
  for (VertexId v : doomed) remove(occ, v);
}

std::set<std::pair<VertexId, VertexId>> Workspace::links_between(OccId a, OccId b) const {
  std::set<std::pair<VertexId, VertexId>> out;
  for (const auto& [v, stub] : set_of(a)) {
    auto it = stub.out.find(b);
    if (it == stub.out.end()) continue;
    for (VertexId u : it->second) out.emplace(v, u);
  }
  return out;
}

std::string Workspace::dump() const {
  std::ostringstream os;
  for (const auto& [occ, set] : sets_) {
    if (set.empty()) continue;
    os << "R[" << occ << "]:";
    for (const auto& [v, stub] : set) {
      os << " " << v.packed << "(";
      bool first = true;
      for (const auto& [pocc, partners] : stub.out) {
        for (VertexId p : partners) {
          if (!first) os << ",";
          os << ">" << pocc << ":" << p.packed;
          first = false;
        }
      }
      for (const auto& [pocc, partners] : stub.in) {
        for (VertexId p : partners) {
          if (!first) os << ",";
          os << "<" << pocc << ":" << p.packed;
          first = false;
        }
      }
      os << ")";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace repath
