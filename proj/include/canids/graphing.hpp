#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "canids/can_log.hpp"

namespace canids {

enum class WindowMode : std::uint8_t { TimeMs, FrameCount };

// Threshold meaning "any injected frame (or any suspension overlap)".
inline constexpr double kAnyAttack = 1e-12;

struct WindowSpec {
  WindowMode mode = WindowMode::TimeMs;
  double size = 23.0;  // milliseconds or frames, depending on mode
  double label_threshold = kAnyAttack;
};

void validate(const WindowSpec& spec);

enum class WindowLabel : std::uint8_t { AttackFree = 0, Attacked = 1 };

using AttackMask = std::uint16_t;

inline AttackMask attack_bit(AttackKind kind) {
  return static_cast<AttackMask>(1u << static_cast<unsigned>(kind));
}

struct Window {
  std::size_t index = 0;
  double start = 0.0;  // seconds
  double end = 0.0;
  std::size_t first_frame = 0;  // offset of frames.front() in the log
  std::span<const LabeledFrame> frames;
  WindowLabel label = WindowLabel::AttackFree;
  AttackMask attack_kinds = 0;
};

// Tumbling windows over `log`. The returned spans point into `log.frames`.
//  TimeMs: [t0 + k*size, t0 + (k+1)*size) with t0 the first timestamp; slots
//    without frames are skipped. A log that fits in one slot yields a window
//    only if it holds >= 2 frames.
//  FrameCount: blocks of `size` frames; a trailing partial block is kept only
//    if it holds >= 2 frames.
std::vector<Window> window_stream(const FrameLog& log, const WindowSpec& spec);

// How repeated transitions between the same pair of ids are counted.
enum class EdgeMode : std::uint8_t {
  Simple,      // distinct directed edges; degrees count neighbours
  Multigraph,  // every transition is an edge; degrees and PageRank use multiplicity
};

struct Edge {
  std::uint32_t src = 0;  // vertex indices, not can ids
  std::uint32_t dst = 0;
  std::uint32_t count = 0;  // transitions src -> dst observed in the window

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Directed graph of arbitration ids; an edge per consecutive frame pair.
class MessageGraph {
 public:
  MessageGraph() = default;

  std::size_t vertex_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edges_.size(); }  // distinct edges
  std::size_t transition_count() const { return transitions_; }

  // Sorted ascending; vertex i has can id ids()[i].
  const std::vector<std::uint32_t>& ids() const { return ids_; }
  // Sorted by (src, dst).
  const std::vector<Edge>& edges() const { return edges_; }

  // Degrees over distinct edges (self-loops count once on each side).
  const std::vector<std::uint32_t>& in_degree() const { return in_degree_; }
  const std::vector<std::uint32_t>& out_degree() const { return out_degree_; }
  // Degrees counting edge multiplicity.
  const std::vector<std::uint32_t>& weighted_in_degree() const { return w_in_; }
  const std::vector<std::uint32_t>& weighted_out_degree() const { return w_out_; }

  // Index of `can_id`, or vertex_count() when absent.
  std::size_t index_of(std::uint32_t can_id) const;
  std::uint32_t edge_multiplicity(std::uint32_t src_id, std::uint32_t dst_id) const;

  static MessageGraph from_id_sequence(std::span<const std::uint32_t> sequence);
  // Explicit vertex set (isolated vertices allowed) and (src, dst) id pairs,
  // repeated pairs adding multiplicity.
  static MessageGraph from_transitions(
      std::span<const std::uint32_t> vertices,
      std::span<const std::pair<std::uint32_t, std::uint32_t>> transitions);

  friend bool operator==(const MessageGraph&, const MessageGraph&) = default;

 private:
  static MessageGraph assemble(std::vector<std::uint32_t> ids,
                               std::span<const std::pair<std::uint32_t, std::uint32_t>> transitions);

  std::vector<std::uint32_t> ids_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> in_degree_, out_degree_, w_in_, w_out_;
  std::size_t transitions_ = 0;
};

// Throws DataError("empty window") when `frames` is empty.
MessageGraph build_graph(std::span<const LabeledFrame> frames);
MessageGraph build_graph(const Window& window);

}  // namespace canids
