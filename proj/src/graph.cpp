#include "repath/graph.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace repath {

LabelId LabeledGraph::find_label(std::string_view name) const {
  if (name == "#") return kWildcardLabel;
  auto it = label_ids_.find(name);
  return it == label_ids_.end() ? kInvalidLabel : it->second;
}

LabelId LabeledGraph::require_label(std::string_view name) const {
  LabelId l = find_label(name);
  if (l == kInvalidLabel) throw UnknownLabelError(std::string(name));
  return l;
}

std::vector<VertexId> LabeledGraph::vertices_by_label(std::string_view label,
                                                      std::optional<std::uint32_t> partition) const {
  LabelId l = require_label(label);
  std::vector<VertexId> out;
  auto add_from = [&](const Partition& p, std::uint32_t pi) {
    if (l == kWildcardLabel) {
      for (std::uint64_t i = 0; i < p.names.size(); ++i) out.push_back(VertexId::pack(pi, i));
    } else {
      out.insert(out.end(), p.label_index[l].begin(), p.label_index[l].end());
    }
  };
  if (partition) {
    add_from(parts_[*partition], *partition);
  } else {
    for (std::uint32_t pi = 0; pi < parts_.size(); ++pi) add_from(parts_[pi], pi);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<VertexId> LabeledGraph::neighbors_with_label(VertexId v, LabelId l, Direction dir) const {
  std::vector<VertexId> out;
  for (VertexId u : neighbors(v, dir)) {
    if (l == kWildcardLabel || label_of(u) == l) out.push_back(u);
  }
  return out;
}

std::vector<VertexId> LabeledGraph::neighbors_with_label(VertexId v, std::string_view label,
                                                         Direction dir) const {
  LabelId l = find_label(label);
  if (l == kInvalidLabel) return {};
  return neighbors_with_label(v, l, dir);
}

std::optional<VertexId> LabeledGraph::vertex_by_name(std::string_view name) const {
  auto it = name_to_vertex_.find(name);
  if (it == name_to_vertex_.end()) return std::nullopt;
  return it->second;
}

std::vector<VertexId> LabeledGraph::all_vertices() const {
  std::vector<VertexId> out;
  out.reserve(n_);
  for (std::uint32_t pi = 0; pi < parts_.size(); ++pi)
    for (std::uint64_t i = 0; i < parts_[pi].names.size(); ++i) out.push_back(VertexId::pack(pi, i));
  return out;
}

std::uint64_t LabeledGraph::structure_checksum() const {
  std::uint64_t h = 0;
  for (VertexId v : all_vertices()) {
    h = fnv1a(h, &v.packed, sizeof v.packed);
    LabelId l = label_of(v);
    h = fnv1a(h, &l, sizeof l);
    for (VertexId u : out_neighbors(v)) h = fnv1a(h, &u.packed, sizeof u.packed);
    for (VertexId u : in_neighbors(v)) h = fnv1a(h, &u.packed, sizeof u.packed);
  }
  return h;
}

void GraphBuilder::add_edge(std::string src, std::string dst) {
  edges_.emplace_back(std::move(src), std::move(dst));
}

void GraphBuilder::add_label(const std::string& vertex, const std::string& label) {
  auto [it, inserted] = vertex_label_.emplace(vertex, label);
  if (!inserted && it->second != label) throw DuplicateLabelError(vertex);
}

void GraphBuilder::place(const std::string& vertex, std::uint32_t partition) {
  placement_[vertex] = partition;
}

LabeledGraph GraphBuilder::build() && {
  if (partitions_ == 0) throw IngestError("partition count must be >= 1");

  for (const auto& [src, dst] : edges_) {
    if (!vertex_label_.count(src)) throw MissingLabelError(src);
    if (!vertex_label_.count(dst)) throw MissingLabelError(dst);
  }

  LabeledGraph g;
  g.parts_.resize(partitions_);

  // Intern labels in sorted name order.
  std::set<std::string> label_set;
  for (const auto& [v, l] : vertex_label_) label_set.insert(l);
  for (const auto& l : label_set) {
    g.label_ids_.emplace(l, static_cast<LabelId>(g.label_names_.size()));
    g.label_names_.push_back(l);
  }

  // vertex_label_ is name-sorted, so per-partition local ids come out
  // identical no matter how the input streams were ordered.
  for (const auto& [name, label] : vertex_label_) {
    std::uint32_t pi;
    if (auto it = placement_.find(name); it != placement_.end()) {
      pi = it->second;
      if (pi >= partitions_) throw IngestError("placement partition out of range for " + name);
    } else {
      pi = static_cast<std::uint32_t>(fnv1a(seed_, name) % partitions_);
    }
    auto& p = g.parts_[pi];
    VertexId v = VertexId::pack(pi, p.names.size());
    p.names.push_back(name);
    p.labels.push_back(g.label_ids_.at(label));
    g.name_to_vertex_.emplace(name, v);
  }
  g.n_ = g.name_to_vertex_.size();

  for (auto& p : g.parts_) {
    p.out_adj.resize(p.names.size());
    p.in_adj.resize(p.names.size());
    p.label_index.resize(g.label_names_.size());
  }

  std::set<std::pair<VertexId, VertexId>> seen;
  for (const auto& [src, dst] : edges_) {
    VertexId s = g.name_to_vertex_.at(src);
    VertexId d = g.name_to_vertex_.at(dst);
    if (!seen.emplace(s, d).second) continue;  // dedup, results are set-valued
    g.parts_[s.partition()].out_adj[s.local()].push_back(d);
    g.parts_[d.partition()].in_adj[d.local()].push_back(s);
  }
  g.m_ = seen.size();

  for (std::uint32_t pi = 0; pi < g.parts_.size(); ++pi) {
    auto& p = g.parts_[pi];
    for (auto& adj : p.out_adj) std::sort(adj.begin(), adj.end());
    for (auto& adj : p.in_adj) std::sort(adj.begin(), adj.end());
    for (std::uint64_t i = 0; i < p.labels.size(); ++i)
      p.label_index[p.labels[i]].push_back(VertexId::pack(pi, i));
  }
  return g;
}

LabeledGraph ingest(std::span<const EdgeRecord> edges, std::span<const LabelRecord> labels,
                    std::uint32_t partitions, std::uint64_t partition_seed) {
  GraphBuilder b(partitions, partition_seed);
  for (const auto& [v, l] : labels) b.add_label(v, l);
  for (const auto& [s, d] : edges) b.add_edge(s, d);
  return std::move(b).build();
}

namespace {

std::pair<std::string, std::string> split_tab_line(const std::string& line, const std::string& what) {
  auto tab = line.find('\t');
  if (tab == std::string::npos) throw IngestError("malformed " + what + " line: '" + line + "'");
  return {line.substr(0, tab), line.substr(tab + 1)};
}

}  // namespace

LabeledGraph ingest_files(const std::string& edge_path, const std::string& label_path,
                          std::uint32_t partitions, std::uint64_t partition_seed) {
  GraphBuilder b(partitions, partition_seed);
  std::ifstream lf(label_path);
  if (!lf) throw IngestError("cannot open label file: " + label_path);
  std::string line;
  while (std::getline(lf, line)) {
    if (line.empty()) continue;
    auto [v, l] = split_tab_line(line, "label");
    b.add_label(v, l);
  }
  std::ifstream ef(edge_path);
  if (!ef) throw IngestError("cannot open edge file: " + edge_path);
  while (std::getline(ef, line)) {
    if (line.empty()) continue;
    auto [s, d] = split_tab_line(line, "edge");
    b.add_edge(s, d);
  }
  return std::move(b).build();
}

void write_graph_files(const LabeledGraph& g, std::ostream& edges, std::ostream& labels) {
  for (VertexId v : g.all_vertices()) {
    labels << g.external_name(v) << '\t' << g.label_name(g.label_of(v)) << '\n';
    for (VertexId u : g.out_neighbors(v))
      edges << g.external_name(v) << '\t' << g.external_name(u) << '\n';
  }
}

LabeledGraph generate_rmat(std::uint64_t n, double avg_degree, std::span<const std::string> labels,
                           std::uint64_t seed, std::uint32_t partitions,
                           std::uint64_t partition_seed) {
  if (n < 1) throw IngestError("rmat: n must be >= 1");
  if (labels.empty()) throw IngestError("rmat: need at least one label");

  int bits = 0;
  while ((std::uint64_t{1} << bits) < n) ++bits;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double pa = 0.57, pb = 0.19, pc = 0.19;  // pd = 0.05

  auto sample_coord = [&]() -> std::pair<std::uint64_t, std::uint64_t> {
    std::uint64_t row = 0, col = 0;
    for (int i = 0; i < bits; ++i) {
      double r = unit(rng);
      row <<= 1;
      col <<= 1;
      if (r < pa) {
      } else if (r < pa + pb) {
        col |= 1;
      } else if (r < pa + pb + pc) {
        row |= 1;
      } else {
        row |= 1;
        col |= 1;
      }
    }
    return {row, col};
  };

  const std::uint64_t target = static_cast<std::uint64_t>(avg_degree * static_cast<double>(n) + 0.5);
  std::set<std::pair<std::uint64_t, std::uint64_t>> edges;
  const std::uint64_t max_possible = n * n;
  std::uint64_t want = std::min(target, max_possible);
  while (edges.size() < want) {
    auto [r, c] = sample_coord();
    if (r >= n || c >= n) continue;
    edges.emplace(r, c);
  }

  auto name_of = [](std::uint64_t i) { return "v" + std::to_string(i); };
  GraphBuilder b(partitions, partition_seed);
  std::uniform_int_distribution<std::size_t> pick(0, labels.size() - 1);
  for (std::uint64_t i = 0; i < n; ++i) b.add_label(name_of(i), labels[pick(rng)]);
  for (const auto& [r, c] : edges) b.add_edge(name_of(r), name_of(c));
  return std::move(b).build();
}

}  // namespace repath
