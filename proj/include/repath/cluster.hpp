#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "repath/exec.hpp"
#include "repath/graph.hpp"
#include "repath/plan.hpp"
#include "repath/workspace.hpp"

namespace repath {

struct UnknownVertexError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LostMessageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCoordinator = 0xFFFFFFFFu;

/// BatchGetNeighbor input row, routed to partition(id). `source` picks what
/// the owning worker reads: graph adjacency (label-filtered by r2) or the
/// stub's existing r2 links. Only ids and query-side labels go on the wire.
struct NeighborRequest {
  VertexId id;
  OccId r1;  // occurrence/label of the node itself
  OccId r2;  // requested neighbor label (occurrence)
  Direction dir = Direction::Forward;
  enum class Source : std::uint8_t { Adjacency, Links } source = Source::Adjacency;
  bool existing_only = false;  // Adjacency mode: keep only ids with a stub

  auto operator<=>(const NeighborRequest&) const = default;
};

/// Four-column schema shared by BatchGetNeighbor replies and BatchAddLink.
struct LinkRecord {
  VertexId pid;
  OccId plabel;
  VertexId cid;
  OccId clabel;

  auto operator<=>(const LinkRecord&) const = default;
};

struct MessageLogEntry {
  int round;
  std::uint32_t src, dst;
  std::string primitive;
  std::size_t records;
  int invocation = 0;  // primitive call this message belonged to
};

/// In-process cluster simulation: one worker per graph partition, each
/// owning its shard of the graph and of the workspace. Workers interact only
/// through the two batch primitives; within one invocation each destination
/// worker receives at most one message. Delivery is round-ordered, so runs
/// are reproducible.
class Cluster {
 public:
  Cluster(const LabeledGraph& g, const OccTable& occs);

  std::uint32_t worker_count() const { return static_cast<std::uint32_t>(shards_.size()); }

  /// Routes requests by partition(id); one message per destination worker.
  /// Local work for `src` is answered in place without a message.
  std::vector<LinkRecord> batch_get_neighbor(const std::vector<NeighborRequest>& reqs,
                                             std::uint32_t src = kCoordinator);
  /// Each record lands on the owners of both endpoints; idempotent.
  void batch_add_link(const std::vector<LinkRecord>& recs, std::uint32_t src = kCoordinator);

  void execute(const PhysicalPlan& plan);
  void run_op(const PhysicalOp& op);

  const Workspace& shard(std::uint32_t w) const { return shards_[w].ws; }
  /// Union of the shards with stale one-sided link mirrors dropped.
  Workspace merged() const;

  const std::vector<MessageLogEntry>& message_log() const { return log_; }
  void dump_message_log(std::ostream& os) const;
  int rounds() const { return round_; }

  /// Drop the next outgoing message; the engine must detect the loss.
  void inject_message_loss() { drop_next_ = true; }

  std::uint64_t touches() const { return touches_; }

 private:
  struct Shard {
    std::uint32_t id;
    Workspace ws;
  };

  LabelId label(OccId o) const { return occ_label_[o]; }
  void log_message(std::uint32_t src, std::uint32_t dst, const char* primitive, std::size_t records);
  std::vector<LinkRecord> answer_requests(std::uint32_t owner, const std::vector<NeighborRequest>& reqs);
  void apply_links(std::uint32_t owner, const std::vector<LinkRecord>& recs);

  void dist_load(const PhysicalOp& op);
  void dist_self_link(const PhysicalOp& op);
  void dist_neighbor(const PhysicalOp& op);
  void dist_single_link(const PhysicalOp& op);
  void dist_double_link(const PhysicalOp& op);
  void dist_closure_link(const PhysicalOp& op);
  void dist_filters(const PhysicalOp& op);

  const LabeledGraph* g_;
  std::vector<LabelId> occ_label_;
  std::vector<Shard> shards_;
  std::vector<MessageLogEntry> log_;
  int round_ = 0;
  int invocation_ = 0;
  bool drop_next_ = false;
  std::uint64_t touches_ = 0;
};

}  // namespace repath
