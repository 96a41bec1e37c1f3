#include "canids/graphing.hpp"

#include <algorithm>
#include <cmath>

#include "canids/error.hpp"

namespace canids {

namespace {

double overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

void label_window(Window& w, const FrameLog& log, const WindowSpec& spec) {
  std::size_t injected = 0;
  for (const auto& f : w.frames) {
    if (f.label != Label::Injected) continue;
    ++injected;
    if (f.attack_kind) w.attack_kinds |= attack_bit(*f.attack_kind);
  }
  const double injected_fraction =
      static_cast<double>(injected) / static_cast<double>(w.frames.size());
  bool attacked = injected > 0 && injected_fraction >= spec.label_threshold;

  const double length = w.end - w.start;
  for (const auto& s : log.suspensions) {
    double fraction = 0.0;
    if (length > 0.0) {
      fraction = overlap(w.start, w.end, s.start, s.end) / length;
    } else if (w.start >= s.start && w.start < s.end) {
      fraction = 1.0;
    }
    if (fraction > 0.0 && fraction >= spec.label_threshold) {
      attacked = true;
      w.attack_kinds |= attack_bit(AttackKind::Suspension);
    }
  }
  w.label = attacked ? WindowLabel::Attacked : WindowLabel::AttackFree;
}

}  // namespace

void validate(const WindowSpec& spec) {
  if (!(spec.size > 0.0)) throw InvalidArgument("window size must be > 0");
  if (spec.mode == WindowMode::FrameCount && spec.size != std::floor(spec.size))
    throw InvalidArgument("frame-count window size must be an integer");
  if (!(spec.label_threshold > 0.0 && spec.label_threshold <= 1.0))
    throw InvalidArgument("label_threshold must lie in (0, 1]");
}

std::vector<Window> window_stream(const FrameLog& log, const WindowSpec& spec) {
  validate(spec);
  std::vector<Window> windows;
  const auto& frames = log.frames;
  if (frames.empty()) return windows;

  auto emit = [&](std::size_t begin, std::size_t end, double start, double stop) {
    Window w;
    w.index = windows.size();
    w.start = start;
    w.end = stop;
    w.first_frame = begin;
    w.frames = std::span<const LabeledFrame>(frames).subspan(begin, end - begin);
    label_window(w, log, spec);
    windows.push_back(w);
  };

  if (spec.mode == WindowMode::FrameCount) {
    const auto size = static_cast<std::size_t>(spec.size);
    for (std::size_t begin = 0; begin < frames.size(); begin += size) {
      const std::size_t end = std::min(frames.size(), begin + size);
      if (end - begin < size && end - begin < 2) break;
      emit(begin, end, frames[begin].timestamp, frames[end - 1].timestamp);
    }
    return windows;
  }

  // Slot arithmetic in integer nanoseconds keeps boundaries exact for sizes
  // such as 11.5 ms.
  const double t0 = frames.front().timestamp;
  const auto size_ns = static_cast<std::int64_t>(std::llround(spec.size * 1e6));
  if (size_ns <= 0) throw InvalidArgument("window size below 1 ns");
  auto slot_of = [&](double t) {
    return std::llround((t - t0) * 1e9) / size_ns;
  };
  if (slot_of(frames.back().timestamp) == 0 && frames.size() < 2) return windows;

  std::size_t begin = 0;
  while (begin < frames.size()) {
    const auto slot = slot_of(frames[begin].timestamp);
    std::size_t end = begin + 1;
    while (end < frames.size() && slot_of(frames[end].timestamp) == slot) ++end;
    const double start = t0 + static_cast<double>(slot * size_ns) * 1e-9;
    emit(begin, end, start, start + static_cast<double>(size_ns) * 1e-9);
    begin = end;
  }
  return windows;
}

std::size_t MessageGraph::index_of(std::uint32_t can_id) const {
  const auto it = std::lower_bound(ids_.begin(), ids_.end(), can_id);
  return it != ids_.end() && *it == can_id ? static_cast<std::size_t>(it - ids_.begin())
                                           : ids_.size();
}

std::uint32_t MessageGraph::edge_multiplicity(std::uint32_t src_id,
                                              std::uint32_t dst_id) const {
  const auto s = index_of(src_id);
  const auto d = index_of(dst_id);
  if (s == ids_.size() || d == ids_.size()) return 0;
  const Edge key{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(d), 0};
  const auto it = std::lower_bound(
      edges_.begin(), edges_.end(), key, [](const Edge& a, const Edge& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
      });
  return it != edges_.end() && it->src == key.src && it->dst == key.dst ? it->count : 0;
}

MessageGraph MessageGraph::assemble(std::vector<std::uint32_t> ids,
                                    std::span<const std::pair<std::uint32_t, std::uint32_t>> transitions) {
  MessageGraph g;
  g.ids_ = std::move(ids);
  std::sort(g.ids_.begin(), g.ids_.end());
  g.ids_.erase(std::unique(g.ids_.begin(), g.ids_.end()), g.ids_.end());

  std::vector<std::uint64_t> keys;
  keys.reserve(transitions.size());
  for (const auto& [src, dst] : transitions) {
    const auto s = g.index_of(src);
    const auto d = g.index_of(dst);
    if (s == g.ids_.size() || d == g.ids_.size())
      throw InvalidArgument("transition endpoint is not a vertex");
    keys.push_back(std::uint64_t{s} << 32 | d);
  }
  std::sort(keys.begin(), keys.end());
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    g.edges_.push_back({static_cast<std::uint32_t>(keys[i] >> 32),
                        static_cast<std::uint32_t>(keys[i] & 0xFFFFFFFFu),
                        static_cast<std::uint32_t>(j - i)});
    i = j;
  }
  g.transitions_ = keys.size();

  const auto n = g.ids_.size();
  g.in_degree_.assign(n, 0);
  g.out_degree_.assign(n, 0);
  g.w_in_.assign(n, 0);
  g.w_out_.assign(n, 0);
  for (const auto& e : g.edges_) {
    ++g.out_degree_[e.src];
    ++g.in_degree_[e.dst];
    g.w_out_[e.src] += e.count;
    g.w_in_[e.dst] += e.count;
  }
  return g;
}

MessageGraph MessageGraph::from_id_sequence(std::span<const std::uint32_t> sequence) {
  if (sequence.empty()) throw DataError("empty window");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> transitions;
  transitions.reserve(sequence.size());
  for (std::size_t i = 0; i + 1 < sequence.size(); ++i)
    transitions.emplace_back(sequence[i], sequence[i + 1]);
  return assemble({sequence.begin(), sequence.end()}, transitions);
}

MessageGraph MessageGraph::from_transitions(
    std::span<const std::uint32_t> vertices,
    std::span<const std::pair<std::uint32_t, std::uint32_t>> transitions) {
  if (vertices.empty()) throw DataError("empty window");
  return assemble({vertices.begin(), vertices.end()}, transitions);
}

MessageGraph build_graph(std::span<const LabeledFrame> frames) {
  if (frames.empty()) throw DataError("empty window");
  std::vector<std::uint32_t> ids;
  ids.reserve(frames.size());
  for (const auto& f : frames) ids.push_back(f.can_id);
  return MessageGraph::from_id_sequence(ids);
}

MessageGraph build_graph(const Window& window) { return build_graph(window.frames); }

}  // namespace canids
