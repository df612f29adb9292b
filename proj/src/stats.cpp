#include "repath/stats.hpp"

#include <ostream>
#include <vector>

namespace repath {

double StatsCatalog::num(LabelId l) const {
  if (l == kWildcardLabel) return static_cast<double>(n_);
  auto it = num_.find(l);
  return it == num_.end() ? 0.0 : it->second;
}

double StatsCatalog::neighbor_avg(LabelId l, Direction d) const {
  const auto& t = tables(d);
  if (l == kWildcardLabel) return t.global_avg_degree;
  auto it = t.neighbor_avg.find(l);
  return it == t.neighbor_avg.end() ? 0.0 : it->second;
}

double StatsCatalog::pro(LabelId l1, LabelId l2, Direction d) const {
  const auto& t = tables(d);
  if (l1 == kWildcardLabel) {
    // weighted over source labels
    if (n_ == 0) return opt_.delta_p;
    double acc = 0;
    for (const auto& [l, cnt] : num_) acc += cnt * pro(l, l2, d);
    return acc / static_cast<double>(n_);
  }
  if (l2 == kWildcardLabel) {
    auto it = t.pro_any.find(l1);
    return it == t.pro_any.end() ? opt_.delta_p : it->second;
  }
  auto it = t.pro.find({l1, l2});
  return it == t.pro.end() ? opt_.delta_p : it->second;
}

double StatsCatalog::t_neighbor(LabelId l1, LabelId l2, Direction d) const {
  const auto& t = tables(d);
  if (l1 == kWildcardLabel) {
    if (n_ == 0) return opt_.delta_t;
    double acc = 0;
    for (const auto& [l, cnt] : num_) acc += cnt * t_neighbor(l, l2, d);
    return acc / static_cast<double>(n_);
  }
  if (l2 == kWildcardLabel) {
    // conditional average total degree
    double pa = pro(l1, kWildcardLabel, d);
    double avg = neighbor_avg(l1, d);
    return pa > 0 ? std::max(avg / pa, 1.0) : opt_.delta_t;
  }
  auto it = t.tn.find({l1, l2});
  return it == t.tn.end() ? opt_.delta_t : it->second;
}

std::size_t StatsCatalog::stored_pair_entries() const {
  return out_.pro.size() + out_.tn.size() + in_.pro.size() + in_.tn.size();
}

namespace {

void collect_direction(const LabeledGraph& g, Direction d, const StatsOptions& opt,
                       const std::map<LabelId, double>& num, StatsCatalog::DirTables& t);

}  // namespace

StatsCatalog collect_stats(const LabeledGraph& g, const StatsOptions& opt) {
  StatsCatalog c;
  c.opt_ = opt;
  c.n_ = g.vertex_count();
  c.label_count_ = g.label_count();
  for (VertexId v : g.all_vertices()) c.num_[g.label_of(v)] += 1;
  collect_direction(g, Direction::Forward, opt, c.num_, c.out_);
  collect_direction(g, Direction::Backward, opt, c.num_, c.in_);
  return c;
}

namespace {

void collect_direction(const LabeledGraph& g, Direction d, const StatsOptions& opt,
                       const std::map<LabelId, double>& num, StatsCatalog::DirTables& t) {
  std::map<LabelId, double> deg_sum, any_cnt;
  std::map<std::pair<LabelId, LabelId>, double> with_cnt, nbr_sum;
  double total_deg = 0;
  for (VertexId v : g.all_vertices()) {
    LabelId l1 = g.label_of(v);
    auto nbrs = g.neighbors(v, d);
    deg_sum[l1] += static_cast<double>(nbrs.size());
    total_deg += static_cast<double>(nbrs.size());
    if (!nbrs.empty()) any_cnt[l1] += 1;
    std::map<LabelId, double> per_label;
    for (VertexId u : nbrs) per_label[g.label_of(u)] += 1;
    for (const auto& [l2, cnt] : per_label) {
      with_cnt[{l1, l2}] += 1;
      nbr_sum[{l1, l2}] += cnt;
    }
  }
  std::size_t n = g.vertex_count();
  t.global_avg_degree = n ? total_deg / static_cast<double>(n) : 0.0;
  for (const auto& [l, cnt] : num) {
    t.neighbor_avg[l] = cnt > 0 ? deg_sum[l] / cnt : 0.0;
    double pa = cnt > 0 ? any_cnt[l] / cnt : 0.0;
    if (pa >= opt.eps_p) t.pro_any[l] = pa;
  }
  for (const auto& [pair, cnt] : with_cnt) {
    double p = cnt / num.at(pair.first);
    if (p >= opt.eps_p) t.pro[pair] = p;
    double tn = nbr_sum.at(pair) / cnt;
    if (tn >= opt.eps_t) t.tn[pair] = tn;
  }
}

}  // namespace

void StatsCatalog::write(std::ostream& os, const LabeledGraph& g) const {
  auto name = [&](LabelId l) { return g.label_name(l); };
  for (const auto& [l, v] : num_) os << "num," << name(l) << "," << v << "\n";
  for (Direction d : {Direction::Forward, Direction::Backward}) {
    const char* sfx = d == Direction::Forward ? "out" : "in";
    const auto& t = tables(d);
    for (const auto& [l, v] : t.neighbor_avg) os << "neighbor_" << sfx << "," << name(l) << "," << v << "\n";
    for (const auto& [p, v] : t.pro)
      os << "pro_" << sfx << "," << name(p.first) << "," << name(p.second) << "," << v << "\n";
    for (const auto& [p, v] : t.tn)
      os << "tneighbor_" << sfx << "," << name(p.first) << "," << name(p.second) << "," << v << "\n";
  }
}

}  // namespace repath
