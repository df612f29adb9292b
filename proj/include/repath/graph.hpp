#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "repath/types.hpp"

namespace repath {

struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingLabelError : IngestError {
  explicit MissingLabelError(const std::string& v)
      : IngestError("MissingLabel: edge endpoint '" + v + "' has no label record") {}
};
struct DuplicateLabelError : IngestError {
  explicit DuplicateLabelError(const std::string& v)
      : IngestError("DuplicateLabel: conflicting label records for vertex '" + v + "'") {}
};
struct UnknownLabelError : std::runtime_error {
  explicit UnknownLabelError(const std::string& l)
      : std::runtime_error("UnknownLabel: '" + l + "' is not in the graph alphabet") {}
};

/// Immutable partitioned vertex-labeled directed graph.
///
/// Vertices are assigned to partitions by a seeded hash of their external
/// name; the partition is encoded in the vertex id. The only structural
/// index is the per-partition label index (label -> sorted vertex ids),
/// whose total size is O(n). Frozen after construction: all reads are
/// safe from any number of concurrent readers.
class LabeledGraph {
 public:
  std::size_t vertex_count() const { return n_; }
  std::size_t edge_count() const { return m_; }
  std::uint32_t partition_count() const { return static_cast<std::uint32_t>(parts_.size()); }
  std::size_t label_count() const { return label_names_.size(); }

  LabelId label_of(VertexId v) const { return part(v).labels[v.local()]; }
  const std::string& label_name(LabelId l) const { return label_names_[l]; }
  LabelId find_label(std::string_view name) const;
  LabelId require_label(std::string_view name) const;  // throws UnknownLabelError

  std::span<const VertexId> out_neighbors(VertexId v) const { return part(v).out_adj[v.local()]; }
  std::span<const VertexId> in_neighbors(VertexId v) const { return part(v).in_adj[v.local()]; }
  std::span<const VertexId> neighbors(VertexId v, Direction dir) const {
    return dir == Direction::Forward ? out_neighbors(v) : in_neighbors(v);
  }

  /// Index probe behind the Load operator. Ascending id order.
  const std::vector<VertexId>& vertices_with_label(std::uint32_t partition, LabelId l) const {
    return parts_[partition].label_index[l];
  }
  std::vector<VertexId> vertices_by_label(std::string_view label,
                                          std::optional<std::uint32_t> partition = {}) const;

  /// dir-neighbors of v restricted to label l; the wildcard returns all
  /// neighbors in that direction. Absent label means an empty list.
  std::vector<VertexId> neighbors_with_label(VertexId v, std::string_view label, Direction dir) const;
  std::vector<VertexId> neighbors_with_label(VertexId v, LabelId l, Direction dir) const;

  const std::string& external_name(VertexId v) const { return part(v).names[v.local()]; }
  std::optional<VertexId> vertex_by_name(std::string_view name) const;
  std::vector<VertexId> all_vertices() const;
  bool has_vertex(VertexId v) const {
    return v.partition() < parts_.size() && v.local() < parts_[v.partition()].names.size();
  }

  /// Hash over labels and both adjacency directions; queries must not change it.
  std::uint64_t structure_checksum() const;

 private:
  struct Partition {
    std::vector<std::string> names;              // local -> external name
    std::vector<LabelId> labels;                 // local -> label
    std::vector<std::vector<VertexId>> out_adj;  // local -> sorted neighbors
    std::vector<std::vector<VertexId>> in_adj;
    std::vector<std::vector<VertexId>> label_index;  // label -> sorted vertices
  };

  const Partition& part(VertexId v) const { return parts_[v.partition()]; }

  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<Partition> parts_;
  std::vector<std::string> label_names_;
  std::map<std::string, LabelId, std::less<>> label_ids_;
  std::map<std::string, VertexId, std::less<>> name_to_vertex_;

  friend class GraphBuilder;
};

using EdgeRecord = std::pair<std::string, std::string>;   // src, dst external names
using LabelRecord = std::pair<std::string, std::string>;  // vertex, label

/// Builds a frozen graph from edge and label records. Duplicate edges are
/// deduplicated, self-loops kept. Placement is a seeded hash of the external
/// name unless an explicit override is given; local indices are assigned in
/// sorted name order so the result is independent of input order.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::uint32_t partitions = 1, std::uint64_t partition_seed = 0)
      : partitions_(partitions), seed_(partition_seed) {}

  void add_edge(std::string src, std::string dst);
  void add_label(const std::string& vertex, const std::string& label);
  void place(const std::string& vertex, std::uint32_t partition);  // test hook

  LabeledGraph build() &&;

 private:
  std::uint32_t partitions_;
  std::uint64_t seed_;
  std::vector<EdgeRecord> edges_;
  std::map<std::string, std::string> vertex_label_;
  std::map<std::string, std::uint32_t> placement_;
};

LabeledGraph ingest(std::span<const EdgeRecord> edges, std::span<const LabelRecord> labels,
                    std::uint32_t partitions, std::uint64_t partition_seed = 0);

/// Edge file: one `src<TAB>dst` per line; label file: `vertex<TAB>label`.
LabeledGraph ingest_files(const std::string& edge_path, const std::string& label_path,
                          std::uint32_t partitions, std::uint64_t partition_seed = 0);
void write_graph_files(const LabeledGraph& g, std::ostream& edges, std::ostream& labels);

/// RMAT recursive-quadrant sampler with quadrant probabilities
/// (0.57, 0.19, 0.19, 0.05). Produces exactly round(n*avg_degree) distinct
/// edges (self-loops allowed) and uniform random labels; deterministic for a
/// fixed seed.
LabeledGraph generate_rmat(std::uint64_t n, double avg_degree, std::span<const std::string> labels,
                           std::uint64_t seed, std::uint32_t partitions = 1,
                           std::uint64_t partition_seed = 0);

}  // namespace repath
