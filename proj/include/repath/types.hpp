#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace repath {

/// Label identifier interned by the graph. The wildcard is query-side only
/// and never appears as a vertex label.
using LabelId = std::uint32_t;
inline constexpr LabelId kWildcardLabel = 0xFFFFFFFFu;
inline constexpr LabelId kInvalidLabel = 0xFFFFFFFEu;

/// One textual occurrence of a symbol in a query. Repeated labels get
/// distinct occurrence ids so their intermediate results stay separate.
using OccId = std::uint32_t;
inline constexpr OccId kNoOcc = 0xFFFFFFFFu;

enum class Direction : std::uint8_t { Forward, Backward };

inline Direction flip(Direction d) {
  return d == Direction::Forward ? Direction::Backward : Direction::Forward;
}

/// Vertex id with the owning machine encoded in the high bits, so the
/// partition of any vertex is known from the id alone.
struct VertexId {
  std::uint64_t packed = 0;

  static constexpr int kPartitionBits = 16;
  static constexpr int kLocalBits = 64 - kPartitionBits;
  static constexpr std::uint64_t kLocalMask = (std::uint64_t{1} << kLocalBits) - 1;

  static VertexId pack(std::uint32_t partition, std::uint64_t local) {
    if (local > kLocalMask) throw std::overflow_error("VertexId: local index overflow");
    VertexId v;
    v.packed = (static_cast<std::uint64_t>(partition) << kLocalBits) | local;
    return v;
  }

  std::uint32_t partition() const { return static_cast<std::uint32_t>(packed >> kLocalBits); }
  std::uint64_t local() const { return packed & kLocalMask; }

  auto operator<=>(const VertexId&) const = default;
};

struct VertexIdHash {
  std::size_t operator()(VertexId v) const noexcept {
    return std::hash<std::uint64_t>{}(v.packed * 0x9e3779b97f4a7c15ull);
  }
};

/// Seeded FNV-1a, used wherever a stable cross-run hash is needed
/// (partition placement, checksums).
inline std::uint64_t fnv1a(std::uint64_t seed, const void* data, std::size_t len) {
  std::uint64_t h = 1469598103934665603ull ^ (seed * 0x100000001b3ull);
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a(std::uint64_t seed, const std::string& s) {
  return fnv1a(seed, s.data(), s.size());
}

}  // namespace repath
