#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "canids/error.hpp"
#include "canids/graphing.hpp"
#include "canids/ranking.hpp"
#include "canids/traffic_synth.hpp"
#include "doctest.h"

using namespace canids;

namespace {

BaselineProfile one_ecu(double period_ms, double duration) {
  BaselineProfile p;
  p.ecus.push_back(EcuSpec{0x100, period_ms, 1, 8, 0.0});
  p.duration = duration;
  return p;
}

BaselineProfile short_default(double duration) {
  BaselineProfile p = default_baseline_profile();
  p.duration = duration;
  return p;
}

std::size_t injected(const FrameLog& log) {
  return static_cast<std::size_t>(std::count_if(log.frames.begin(), log.frames.end(), [](const auto& f) {
    return f.label == Label::Injected;
  }));
}

}  // namespace

TEST_CASE("periodic emission without jitter") {
  const auto log = generate_baseline(one_ecu(10, 1));
  REQUIRE(log.size() == 100);
  for (std::size_t k = 0; k < 100; ++k) CHECK(log.frames[k].timestamp == doctest::Approx(0.01 * k));
}

TEST_CASE("equal periods interleave by id") {
  BaselineProfile p = one_ecu(10, 1);
  p.ecus.push_back(EcuSpec{0x050, 10, 2, 8, 0.0});
  const auto log = generate_baseline(p);
  REQUIRE(log.size() == 200);
  for (std::size_t k = 0; k < 200; k += 2) {
    CHECK(log.frames[k].can_id == 0x050);
    CHECK(log.frames[k + 1].can_id == 0x100);
  }
}

TEST_CASE("default profile shape") {
  const auto p = default_baseline_profile();
  CHECK(p.ecus.size() == 10);
  CHECK(p.duration == 60);
  for (const auto& e : p.ecus) {
    CHECK(e.period_ms >= 5);
    CHECK(e.period_ms <= 100);
  }
  validate(p);
}

TEST_CASE("baseline is deterministic and ordered") {
  const auto a = generate_baseline(short_default(5));
  const auto b = generate_baseline(short_default(5));
  CHECK(a.frames == b.frames);
  validate(a);
  auto p = short_default(5);
  p.seed = 8;
  CHECK_FALSE(generate_baseline(p).frames == a.frames);
}

TEST_CASE("DoS flood dominates the graph") {
  // One 0x000 frame between every pair of baseline frames.
  const auto base = generate_baseline(one_ecu(1, 1));
  AttackSpec s = make_attack(AttackKind::DoS, 0.0, 1.0);
  s.rate = 1000;
  const auto log = inject_dos(base, s);
  CHECK(injected(log) == 1000);
  for (std::size_t i = 0; i + 1 < log.size(); ++i) CHECK(log.frames[i].can_id != log.frames[i + 1].can_id);
  const auto g = build_graph(std::span<const LabeledFrame>(log.frames).subspan(0, 46));
  CHECK(g.vertex_count() == 2);
  CHECK(pr_summary(g).max == doctest::Approx(0.5));
}

TEST_CASE("DoS among many ids has the largest in-degree and PageRank") {
  const auto base = generate_baseline(short_default(2));
  const auto log = inject_dos(base, make_attack(AttackKind::DoS, 0.5, 1.5));
  for (const auto& w : window_stream(log, {})) {
    if (w.start < 0.5 || w.end > 1.5) continue;
    const auto g = build_graph(w);
    const auto pr = pagerank(g);
    const std::size_t flood = g.index_of(0x000);
    REQUIRE(flood < g.vertex_count());
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      if (v == flood) continue;
      CHECK(g.in_degree()[flood] > g.in_degree()[v]);
      CHECK(pr.scores[flood] > pr.scores[v]);
    }
  }
}

TEST_CASE("attack intervals are validated") {
  const auto base = generate_baseline(short_default(2));
  CHECK_THROWS_AS(inject(base, make_attack(AttackKind::DoS, 1.0, 1.0)), InvalidArgument);
  CHECK_THROWS_AS(inject(base, make_attack(AttackKind::DoS, 1.0, 0.5)), InvalidArgument);
  CHECK_THROWS(inject(base, make_attack(AttackKind::DoS, 1.0, 30.0)));
}

TEST_CASE("injecting into an empty log") {
  const auto log = inject_dos(FrameLog{}, make_attack(AttackKind::DoS, 0.0, 0.5));
  CHECK(log.size() == 1000);
  CHECK(injected(log) == log.size());
}

TEST_CASE("fabrication injectors label and count frames") {
  const auto base = generate_baseline(short_default(5));
  for (AttackKind kind : {AttackKind::DoS, AttackKind::Fuzzy, AttackKind::FuzzingId,
                          AttackKind::FuzzingPayload, AttackKind::Spoofing, AttackKind::Diagnostic}) {
    CAPTURE(to_string(kind));
    AttackSpec s = make_attack(kind, 1.0, 3.0, 11);
    if (kind == AttackKind::Spoofing) s.target_id = 0x130;
    const auto log = inject(base, s);
    validate(log);
    const double expected = s.rate * (s.end - s.start);
    REQUIRE(expected >= 1000);
    const auto n = static_cast<double>(injected(log));
    CHECK(std::abs(n - expected) <= 0.05 * expected);
    CHECK(log.size() == base.size() + injected(log));
    for (const auto& f : log.frames) {
      if (f.label != Label::Injected) continue;
      CHECK(f.attack_kind == kind);
      CHECK(f.timestamp >= 1.0);
      CHECK(f.timestamp < 3.0);
    }
    CHECK(inject(base, s).frames == log.frames);
  }
}

TEST_CASE("injector id conventions") {
  const auto base = generate_baseline(short_default(3));
  std::set<std::uint32_t> legit;
  for (const auto& f : base.frames) legit.insert(f.can_id);

  SUBCASE("fuzzing id uses ids absent from the baseline") {
    const auto log = inject(base, make_attack(AttackKind::FuzzingId, 1, 2));
    for (const auto& f : log.frames)
      if (f.label == Label::Injected) CHECK(legit.count(f.can_id) == 0);
  }
  SUBCASE("fuzzing payload reuses legitimate ids with new payloads") {
    std::map<std::uint32_t, std::set<std::array<std::uint8_t, 8>>> seen;
    for (const auto& f : base.frames) seen[f.can_id].insert(f.data);
    const auto log = inject(base, make_attack(AttackKind::FuzzingPayload, 1, 2));
    for (const auto& f : log.frames) {
      if (f.label != Label::Injected) continue;
      CHECK(legit.count(f.can_id) == 1);
      CHECK(seen[f.can_id].count(f.data) == 0);
    }
  }
  SUBCASE("spoofing uses the target id") {
    AttackSpec s = make_attack(AttackKind::Spoofing, 1, 2);
    CHECK_THROWS_AS(inject(base, s), InvalidArgument);
    s.target_id = 0x260;
    const auto log = inject(base, s);
    for (const auto& f : log.frames)
      if (f.label == Label::Injected) CHECK(f.can_id == 0x260);
  }
  SUBCASE("diagnostic stays in range") {
    const auto log = inject(base, make_attack(AttackKind::Diagnostic, 1, 2));
    for (const auto& f : log.frames)
      if (f.label == Label::Injected) {
        CHECK(f.can_id >= 0x700);
        CHECK(f.can_id <= 0x7FF);
      }
  }
}

TEST_CASE("replay preserves gaps and ids") {
  const auto base = generate_baseline(short_default(12));
  AttackSpec s = make_attack(AttackKind::Replay, 10.0, 11.0);
  s.source_start = 0.0;
  s.source_end = 1.0;
  const auto log = inject(base, s);
  std::vector<LabeledFrame> src, rep;
  for (const auto& f : base.frames)
    if (f.timestamp < 1.0) src.push_back(f);
  for (const auto& f : log.frames)
    if (f.label == Label::Injected) rep.push_back(f);
  REQUIRE(src.size() == rep.size());
  std::multiset<std::uint32_t> a, b;
  for (std::size_t i = 0; i < src.size(); ++i) {
    a.insert(src[i].can_id);
    b.insert(rep[i].can_id);
    if (i == 0) continue;
    CHECK(std::abs((rep[i].timestamp - rep[i - 1].timestamp) -
                   (src[i].timestamp - src[i - 1].timestamp)) <= 1e-9);
  }
  CHECK(a == b);

  // A replayed-only slice carries the same message graph as its source.
  const auto g_src = build_graph(std::span<const LabeledFrame>(src).subspan(0, 40));
  const auto g_rep = build_graph(std::span<const LabeledFrame>(rep).subspan(0, 40));
  CHECK(g_src == g_rep);
}

TEST_CASE("suspension") {
  SUBCASE("only ECU over the whole capture") {
    const auto base = generate_baseline(one_ecu(10, 1));
    AttackSpec s = make_attack(AttackKind::Suspension, 0.0, 1.0);
    s.target_id = 0x100;
    const auto log = inject(base, s);
    CHECK(log.empty());
    REQUIRE(log.suspensions.size() == 1);
  }
  SUBCASE("frames outside the interval are untouched") {
    const auto base = generate_baseline(short_default(3));
    AttackSpec s = make_attack(AttackKind::Suspension, 1.0, 2.0);
    s.target_id = 0x0A0;
    const auto log = inject(base, s);
    std::vector<LabeledFrame> kept;
    for (const auto& f : base.frames)
      if (!(f.can_id == 0x0A0 && f.timestamp >= 1.0 && f.timestamp < 2.0)) kept.push_back(f);
    CHECK(log.frames == kept);
    s.target_id = 0x7AB;
    CHECK_THROWS(inject(base, s));
  }
  SUBCASE("attacked windows shrink against the baseline") {
    BaselineProfile p = one_ecu(5, 2);
    p.ecus.push_back(EcuSpec{0x200, 5, 2, 8, 2.5});
    const auto base = generate_baseline(p);
    AttackSpec s = make_attack(AttackKind::Suspension, 0.5, 1.5);
    s.target_id = 0x200;
    const auto log = inject(base, s);
    const auto wb = window_stream(base, {});
    const auto wl = window_stream(log, {});
    std::size_t compared = 0;
    for (const auto& w : wl) {
      if (w.label != WindowLabel::Attacked || w.start < 0.5 || w.end > 1.5) continue;
      const auto it = std::find_if(wb.begin(), wb.end(), [&](const Window& x) { return x.start == w.start; });
      REQUIRE(it != wb.end());
      const auto ga = build_graph(w);
      const auto gb = build_graph(*it);
      CHECK((ga.vertex_count() < gb.vertex_count() || ga.edge_count() < gb.edge_count()));
      ++compared;
    }
    CHECK(compared > 30);
  }
}

TEST_CASE("mixing attacks") {
  const auto base = generate_baseline(short_default(6));
  std::vector<AttackSpec> specs{make_attack(AttackKind::DoS, 1, 2), make_attack(AttackKind::Fuzzy, 3, 4)};
  const auto log = mix_attacks(base, specs);
  validate(log);
  std::set<AttackKind> kinds;
  for (const auto& f : log.frames)
    if (f.attack_kind) kinds.insert(*f.attack_kind);
  CHECK(kinds == std::set<AttackKind>{AttackKind::DoS, AttackKind::Fuzzy});
  specs.push_back(make_attack(AttackKind::Diagnostic, 1.5, 2.5));
  CHECK_THROWS_AS(mix_attacks(base, specs), InvalidArgument);
}
