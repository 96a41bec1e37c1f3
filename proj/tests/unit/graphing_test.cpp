#include "canids/error.hpp"
#include "canids/graphing.hpp"
#include "doctest.h"

using namespace canids;

namespace {

FrameLog spaced(std::size_t n, double step, std::size_t injected_at = SIZE_MAX) {
  FrameLog log;
  for (std::size_t i = 0; i < n; ++i) {
    const bool inj = i == injected_at;
    log.frames.push_back(make_frame(static_cast<double>(i) * step, 0x100 + (i % 3), {},
                                    inj ? Label::Injected : Label::Normal,
                                    inj ? std::optional(AttackKind::Fuzzy) : std::nullopt));
  }
  return log;
}

}  // namespace

TEST_CASE("time windows") {
  SUBCASE("one injected frame marks its window") {
    const auto w = window_stream(spaced(100, 0.001, 30), {});
    REQUIRE(w.size() == 5);
    CHECK(w[0].label == WindowLabel::AttackFree);
    CHECK(w[1].label == WindowLabel::Attacked);
    CHECK(w[1].attack_kinds == attack_bit(AttackKind::Fuzzy));
  }
  SUBCASE("threshold is a fraction") {
    WindowSpec spec;
    spec.label_threshold = 0.5;
    const auto w = window_stream(spaced(100, 0.001, 30), spec);
    CHECK(w[1].label == WindowLabel::AttackFree);
  }
  SUBCASE("short log") {
    CHECK(window_stream(spaced(2, 0.001), {}).size() == 1);
    CHECK(window_stream(spaced(1, 0.001), {}).empty());
    CHECK(window_stream(FrameLog{}, {}).empty());
  }
  SUBCASE("gaps skip empty slots") {
    FrameLog log = spaced(10, 0.001);
    log.frames.push_back(make_frame(1.0, 0x100, {}));
    log.frames.push_back(make_frame(1.001, 0x101, {}));
    const auto w = window_stream(log, {});
    REQUIRE(w.size() == 2);
    CHECK(w[1].frames.size() == 2);
    CHECK(w[1].first_frame == 10);
  }
  SUBCASE("every frame lands in exactly one window") {
    const auto log = spaced(1000, 0.0007);
    std::size_t total = 0;
    for (const auto& w : window_stream(log, {})) total += w.frames.size();
    CHECK(total == 1000);
  }
}

TEST_CASE("frame-count windows") {
  WindowSpec spec;
  spec.mode = WindowMode::FrameCount;
  spec.size = 10;
  CHECK(window_stream(spaced(25, 0.001), spec).size() == 3);
  CHECK(window_stream(spaced(21, 0.001), spec).size() == 2);
  spec.size = 0;
  CHECK_THROWS_AS(window_stream(spaced(5, 0.001), spec), InvalidArgument);
}

TEST_CASE("suspension overlap labels windows") {
  FrameLog log = spaced(100, 0.001);
  log.suspensions.push_back({0x7FF, 0.050, 0.060});
  const auto w = window_stream(log, {});
  CHECK(w[1].label == WindowLabel::AttackFree);
  CHECK(w[2].label == WindowLabel::Attacked);
  CHECK(w[2].attack_kinds == attack_bit(AttackKind::Suspension));
}

TEST_CASE("graph construction") {
  SUBCASE("single frame") {
    const std::uint32_t ids[] = {0x10};
    const auto g = MessageGraph::from_id_sequence(ids);
    CHECK(g.vertex_count() == 1);
    CHECK(g.edge_count() == 0);
  }
  SUBCASE("empty window") {
    CHECK_THROWS_AS(build_graph(std::span<const LabeledFrame>{}), DataError);
  }
  SUBCASE("degrees and ordering") {
    const std::uint32_t ids[] = {3, 1, 2, 1, 3, 3};
    const auto g = MessageGraph::from_id_sequence(ids);
    CHECK(g.ids() == std::vector<std::uint32_t>{1, 2, 3});
    // 3->1, 1->2, 2->1, 1->3, 3->3
    CHECK(g.edge_count() == 5);
    CHECK(g.transition_count() == 5);
    CHECK(g.out_degree() == std::vector<std::uint32_t>{2, 1, 2});
    CHECK(g.in_degree() == std::vector<std::uint32_t>{2, 1, 2});
    CHECK(g.index_of(9) == 3);
    CHECK(g.edge_multiplicity(2, 3) == 0);
  }
  SUBCASE("window and sequence agree") {
    const auto log = spaced(50, 0.001);
    const auto w = window_stream(log, {});
    std::vector<std::uint32_t> ids;
    for (const auto& f : w[0].frames) ids.push_back(f.can_id);
    CHECK(build_graph(w[0]) == MessageGraph::from_id_sequence(ids));
  }
}
