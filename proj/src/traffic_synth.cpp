#include "canids/traffic_synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <tuple>

#include "canids/error.hpp"
#include "canids/random.hpp"

namespace canids {

namespace {

// Loggers in the public corpora stamp at microsecond resolution.
double quantize_us(double t) { return std::round(t * 1e6) / 1e6; }

std::uint32_t id_mask(const FrameLog& log) {
  return log.id_width == 29 ? kExtendedIdMask : kStandardIdMask;
}

Rng attack_rng(const AttackSpec& spec) {
  return Rng(mix_seed(spec.seed, 100 + static_cast<std::uint64_t>(spec.kind)));
}

void check_interval(const FrameLog& log, const AttackSpec& spec) {
  if (!(spec.start >= 0.0) || !(spec.start < spec.end))
    throw InvalidArgument("attack interval must satisfy 0 <= start < end");
  if (!log.empty()) {
    const double span_end = std::ceil(log.frames.back().timestamp);
    if (spec.end > span_end || spec.start < std::floor(log.frames.front().timestamp))
      throw InvalidArgument("attack interval [" + std::to_string(spec.start) + ", " +
                            std::to_string(spec.end) + ") lies outside the log");
  }
}

void check_rate(const AttackSpec& spec) {
  if (!(spec.rate > 0.0)) throw InvalidArgument("attack rate must be > 0");
}

void check_kind(const AttackSpec& spec, AttackKind kind) {
  if (spec.kind != kind)
    throw InvalidArgument("attack spec kind is " + std::string(to_string(spec.kind)) +
                          ", expected " + std::string(to_string(kind)));
}

// Injection instants: one per 1/rate slot. `random_phase` places each instant
// uniformly inside its slot; otherwise instants are strictly periodic.
std::vector<double> injection_times(const AttackSpec& spec, Rng& rng,
                                    bool random_phase) {
  const auto count =
      static_cast<std::size_t>(std::floor(spec.rate * (spec.end - spec.start) + 1e-9));
  std::vector<double> times;
  times.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double phase = random_phase ? uniform01(rng) : 0.0;
    const double t = quantize_us(spec.start + (static_cast<double>(k) + phase) / spec.rate);
    if (t >= spec.end) break;
    if (!times.empty() && t < times.back()) continue;
    times.push_back(t);
  }
  return times;
}

std::array<std::uint8_t, kMaxDlc> random_bytes(Rng& rng) {
  std::array<std::uint8_t, kMaxDlc> b{};
  const std::uint64_t word = rng();
  for (std::size_t i = 0; i < kMaxDlc; ++i)
    b[i] = static_cast<std::uint8_t>(word >> (8 * i));
  return b;
}

LabeledFrame injected_frame(double t, std::uint32_t id, std::uint8_t dlc,
                            const std::array<std::uint8_t, kMaxDlc>& data,
                            AttackKind kind) {
  LabeledFrame f;
  f.timestamp = t;
  f.can_id = id;
  f.extended = id > kStandardIdMask;
  f.dlc = dlc;
  f.data = data;
  for (std::size_t i = dlc; i < kMaxDlc; ++i) f.data[i] = 0;
  f.label = Label::Injected;
  f.attack_kind = kind;
  return f;
}

std::vector<std::uint32_t> distinct_ids(const FrameLog& log) {
  std::set<std::uint32_t> ids;
  for (const auto& f : log.frames) ids.insert(f.can_id);
  return {ids.begin(), ids.end()};
}

bool before(const LabeledFrame& a, const LabeledFrame& b) {
  return a.timestamp < b.timestamp ||
         (a.timestamp == b.timestamp && a.can_id < b.can_id);
}

std::uint64_t payload_key(const LabeledFrame& f) {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < f.dlc; ++i) key |= std::uint64_t{f.data[i]} << (8 * i);
  return key;
}

}  // namespace

BaselineProfile default_baseline_profile() {
  BaselineProfile p;
  p.duration = 60.0;
  p.jitter_fraction = 0.05;
  p.seed = 7;
  const std::pair<std::uint32_t, double> ecus[] = {
      {0x0A0, 5.0},  {0x130, 10.0}, {0x140, 10.0}, {0x153, 10.0}, {0x18F, 10.0},
      {0x260, 10.0}, {0x2A0, 20.0}, {0x316, 20.0}, {0x329, 50.0}, {0x545, 100.0}};
  std::uint64_t i = 0;
  for (const auto& [id, period] : ecus) {
    EcuSpec e;
    e.can_id = id;
    e.period_ms = period;
    e.payload_seed = i + 1;
    e.offset_ms = std::fmod(1.3 * static_cast<double>(i), period);
    p.ecus.push_back(e);
    ++i;
  }
  return p;
}

void validate(const BaselineProfile& profile) {
  if (profile.ecus.empty()) throw InvalidArgument("profile needs at least one ECU");
  if (!(profile.jitter_fraction >= 0.0 && profile.jitter_fraction <= 0.5))
    throw InvalidArgument("jitter_fraction must lie in [0, 0.5]");
  if (!(profile.duration > 0.0)) throw InvalidArgument("duration must be > 0");
  for (const auto& e : profile.ecus) {
    if (!(e.period_ms > 0.0)) throw InvalidArgument("ECU period must be > 0");
    if (e.dlc > kMaxDlc) throw InvalidArgument("ECU dlc must be <= 8");
    if (e.can_id > kExtendedIdMask) throw InvalidArgument("ECU id exceeds 29 bits");
    if (!(e.offset_ms >= 0.0)) throw InvalidArgument("ECU offset must be >= 0");
  }
}

double default_attack_rate(AttackKind kind) {
  switch (kind) {
    case AttackKind::DoS: return 2000.0;
    case AttackKind::Fuzzy: return 1000.0;
    case AttackKind::FuzzingId: return 500.0;
    case AttackKind::FuzzingPayload: return 1000.0;
    case AttackKind::Spoofing: return 1000.0;
    case AttackKind::Diagnostic: return 500.0;
    case AttackKind::Replay: return 0.0;
    case AttackKind::Suspension: return 0.0;
  }
  return 0.0;
}

AttackSpec make_attack(AttackKind kind, double start, double end, std::uint64_t seed) {
  AttackSpec s;
  s.kind = kind;
  s.start = start;
  s.end = end;
  s.rate = default_attack_rate(kind);
  s.seed = seed;
  if (kind == AttackKind::DoS) s.target_id = 0x000;
  if (kind == AttackKind::Replay) {
    // Replay the equally long stretch of traffic that precedes the attack.
    const double len = end - start;
    s.source_start = std::max(0.0, start - len);
    s.source_end = start;
  }
  return s;
}

FrameLog generate_baseline(const BaselineProfile& profile) {
  validate(profile);
  FrameLog log;
  log.source = "synthetic-baseline";
  std::size_t expected = 0;
  for (const auto& e : profile.ecus)
    expected += static_cast<std::size_t>(profile.duration * 1000.0 / e.period_ms) + 1;
  log.frames.reserve(expected);

  for (std::size_t i = 0; i < profile.ecus.size(); ++i) {
    const auto& ecu = profile.ecus[i];
    if (ecu.can_id > kStandardIdMask) log.id_width = 29;
    Rng timing(mix_seed(profile.seed, 2 * i));
    Rng payload(mix_seed(profile.seed ^ ecu.payload_seed, 2 * i + 1));
    auto data = random_bytes(payload);
    for (std::uint64_t k = 0;; ++k) {
      const double nominal_ms = ecu.offset_ms + static_cast<double>(k) * ecu.period_ms;
      if (nominal_ms / 1000.0 >= profile.duration) break;
      double t_ms = nominal_ms;
      if (profile.jitter_fraction > 0.0)
        t_ms += uniform_real(timing, -profile.jitter_fraction, profile.jitter_fraction) *
                ecu.period_ms;
      const double t = quantize_us(t_ms / 1000.0);
      if (t < 0.0 || t >= profile.duration) continue;
      // Byte 0 is a rolling counter; byte 1 drifts like a slow sensor value.
      if (ecu.dlc > 0) data[0] = static_cast<std::uint8_t>(k);
      if (ecu.dlc > 1 && (payload() & 7) == 0)
        data[1] = static_cast<std::uint8_t>(data[1] + ((payload() & 1) ? 1 : -1));
      LabeledFrame f;
      f.timestamp = t;
      f.can_id = ecu.can_id;
      f.extended = ecu.can_id > kStandardIdMask;
      f.dlc = ecu.dlc;
      std::copy_n(data.begin(), ecu.dlc, f.data.begin());
      log.frames.push_back(f);
    }
  }
  std::stable_sort(log.frames.begin(), log.frames.end(), before);
  return log;
}

FrameLog merge_injected(const FrameLog& log, std::vector<LabeledFrame> injected) {
  std::stable_sort(injected.begin(), injected.end(), before);
  FrameLog out;
  out.source = log.source;
  out.id_width = log.id_width;
  out.suspensions = log.suspensions;
  out.frames.reserve(log.frames.size() + injected.size());
  auto base = log.frames.begin();
  auto inj = injected.begin();
  while (base != log.frames.end() || inj != injected.end()) {
    const bool take_injected =
        base == log.frames.end() || (inj != injected.end() && before(*inj, *base));
    if (take_injected) {
      if (inj->extended) out.id_width = 29;
      out.frames.push_back(*inj++);
    } else {
      out.frames.push_back(*base++);
    }
  }
  return out;
}

FrameLog inject_dos(const FrameLog& log, const AttackSpec& spec) {
  check_kind(spec, AttackKind::DoS);
  check_interval(log, spec);
  check_rate(spec);
  const std::uint32_t flood = spec.target_id.value_or(0x000);
  Rng rng = attack_rng(spec);
  std::vector<LabeledFrame> injected;
  for (double t : injection_times(spec, rng, false))
    injected.push_back(injected_frame(t, flood, 8, {}, AttackKind::DoS));
  return merge_injected(log, std::move(injected));
}

FrameLog inject_fuzzy(const FrameLog& log, const AttackSpec& spec) {
  check_kind(spec, AttackKind::Fuzzy);
  check_interval(log, spec);
  check_rate(spec);
  Rng rng = attack_rng(spec);
  const std::uint64_t id_space = std::uint64_t{id_mask(log)} + 1;
  std::vector<LabeledFrame> injected;
  for (double t : injection_times(spec, rng, true)) {
    const auto id = static_cast<std::uint32_t>(uniform_below(rng, id_space));
    injected.push_back(injected_frame(t, id, 8, random_bytes(rng), AttackKind::Fuzzy));
  }
  return merge_injected(log, std::move(injected));
}

FrameLog inject_fuzzing_id(const FrameLog& log, const AttackSpec& spec) {
  check_kind(spec, AttackKind::FuzzingId);
  check_interval(log, spec);
  check_rate(spec);
  if (log.empty()) throw InvalidArgument("fuzzing-id injection needs legitimate frames");
  const auto legit = distinct_ids(log);
  std::vector<std::uint32_t> candidates;
  // Candidates come from the standard id space; extended logs are sampled the same way.
  for (std::uint32_t id = 0; id <= kStandardIdMask; ++id)
    if (!std::binary_search(legit.begin(), legit.end(), id)) candidates.push_back(id);
  if (candidates.empty())
    throw InvalidArgument("no unused can_id left for fuzzing-id injection");
  Rng rng = attack_rng(spec);
  std::vector<LabeledFrame> injected;
  for (double t : injection_times(spec, rng, true)) {
    const auto id = candidates[uniform_below(rng, candidates.size())];
    const auto& donor = log.frames[uniform_below(rng, log.frames.size())];
    injected.push_back(injected_frame(t, id, donor.dlc, donor.data, AttackKind::FuzzingId));
  }
  return merge_injected(log, std::move(injected));
}

FrameLog inject_fuzzing_payload(const FrameLog& log, const AttackSpec& spec) {
  check_kind(spec, AttackKind::FuzzingPayload);
  check_interval(log, spec);
  check_rate(spec);
  std::set<std::pair<std::uint32_t, std::uint8_t>> id_dlc;
  std::set<std::tuple<std::uint32_t, std::uint8_t, std::uint64_t>> pairs;
  for (const auto& f : log.frames) {
    pairs.emplace(f.can_id, f.dlc, payload_key(f));
    if (f.dlc > 0) id_dlc.emplace(f.can_id, f.dlc);
  }
  if (id_dlc.empty())
    throw InvalidArgument("fuzzing-payload injection needs legitimate frames with payload");
  const std::vector<std::pair<std::uint32_t, std::uint8_t>> targets(id_dlc.begin(),
                                                                    id_dlc.end());
  Rng rng = attack_rng(spec);
  std::vector<LabeledFrame> injected;
  for (double t : injection_times(spec, rng, true)) {
    const auto [id, dlc] = targets[uniform_below(rng, targets.size())];
    LabeledFrame f;
    for (int attempt = 0;; ++attempt) {
      f = injected_frame(t, id, dlc, random_bytes(rng), AttackKind::FuzzingPayload);
      if (!pairs.contains({id, dlc, payload_key(f)})) break;
      if (attempt > 1000)
        throw InvalidArgument("could not find an unseen payload for id " +
                              std::to_string(id));
    }
    injected.push_back(f);
  }
  return merge_injected(log, std::move(injected));
}

FrameLog inject_spoofing(const FrameLog& log, const AttackSpec& spec) {
  check_kind(spec, AttackKind::Spoofing);
  check_interval(log, spec);
  check_rate(spec);
  if (!spec.target_id) throw InvalidArgument("spoofing needs a target id");
  const std::uint32_t target = *spec.target_id;
  const auto it = std::find_if(log.frames.begin(), log.frames.end(),
                               [&](const LabeledFrame& f) { return f.can_id == target; });
  if (it == log.frames.end())
    throw InvalidArgument("spoofing target id is not present in the log");
  Rng rng = attack_rng(spec);
  std::vector<LabeledFrame> injected;
  for (double t : injection_times(spec, rng, true))
    injected.push_back(
        injected_frame(t, target, it->dlc, random_bytes(rng), AttackKind::Spoofing));
  return merge_injected(log, std::move(injected));
}

FrameLog inject_diagnostic(const FrameLog& log, const AttackSpec& spec) {
  check_kind(spec, AttackKind::Diagnostic);
  check_interval(log, spec);
  check_rate(spec);
  if (spec.range_lo > spec.range_hi || spec.range_hi > id_mask(log))
    throw InvalidArgument("diagnostic id range is empty or exceeds the id width");
  Rng rng = attack_rng(spec);
  const std::uint64_t width = std::uint64_t{spec.range_hi} - spec.range_lo + 1;
  std::vector<LabeledFrame> injected;
  for (double t : injection_times(spec, rng, true)) {
    const auto id = static_cast<std::uint32_t>(spec.range_lo + uniform_below(rng, width));
    injected.push_back(injected_frame(t, id, 8, random_bytes(rng), AttackKind::Diagnostic));
  }
  return merge_injected(log, std::move(injected));
}

FrameLog inject_replay(const FrameLog& log, const AttackSpec& spec) {
  check_kind(spec, AttackKind::Replay);
  check_interval(log, spec);
  if (!(spec.source_start < spec.source_end) || spec.source_end > spec.start)
    throw InvalidArgument("replay source interval must be non-empty and precede start");
  const double shift = spec.start - spec.source_start;
  std::vector<LabeledFrame> injected;
  for (const auto& f : log.frames) {
    if (f.timestamp < spec.source_start) continue;
    if (f.timestamp >= spec.source_end) break;
    const double t = f.timestamp + shift;
    if (t >= spec.end) break;
    LabeledFrame copy = f;
    copy.timestamp = t;
    copy.label = Label::Injected;
    copy.attack_kind = AttackKind::Replay;
    injected.push_back(copy);
  }
  if (injected.empty()) throw InvalidArgument("replay source interval holds no frames");
  return merge_injected(log, std::move(injected));
}

FrameLog inject_suspension(const FrameLog& log, const AttackSpec& spec) {
  check_kind(spec, AttackKind::Suspension);
  check_interval(log, spec);
  if (!spec.target_id) throw InvalidArgument("suspension needs a target id");
  const std::uint32_t target = *spec.target_id;
  FrameLog out;
  out.source = log.source;
  out.id_width = log.id_width;
  out.suspensions = log.suspensions;
  out.frames.reserve(log.frames.size());
  bool present = false;
  for (const auto& f : log.frames) {
    if (f.can_id != target) {
      out.frames.push_back(f);
      continue;
    }
    present = true;
    if (f.timestamp >= spec.start && f.timestamp < spec.end) continue;
    out.frames.push_back(f);
  }
  if (!present) throw InvalidArgument("suspension target id is not present in the log");
  out.suspensions.push_back({target, spec.start, spec.end});
  return out;
}

FrameLog inject(const FrameLog& log, const AttackSpec& spec) {
  switch (spec.kind) {
    case AttackKind::DoS: return inject_dos(log, spec);
    case AttackKind::Fuzzy: return inject_fuzzy(log, spec);
    case AttackKind::FuzzingId: return inject_fuzzing_id(log, spec);
    case AttackKind::FuzzingPayload: return inject_fuzzing_payload(log, spec);
    case AttackKind::Spoofing: return inject_spoofing(log, spec);
    case AttackKind::Diagnostic: return inject_diagnostic(log, spec);
    case AttackKind::Replay: return inject_replay(log, spec);
    case AttackKind::Suspension: return inject_suspension(log, spec);
  }
  throw InvalidArgument("unknown attack kind");
}

FrameLog mix_attacks(const FrameLog& log, std::span<const AttackSpec> specs) {
  for (std::size_t i = 0; i < specs.size(); ++i)
    for (std::size_t j = i + 1; j < specs.size(); ++j)
      if (specs[i].start < specs[j].end && specs[j].start < specs[i].end)
        throw InvalidArgument("attack intervals " + std::to_string(i) + " and " +
                              std::to_string(j) + " overlap");
  FrameLog out = log;
  for (const auto& spec : specs) out = inject(out, spec);
  return out;
}

}  // namespace canids
