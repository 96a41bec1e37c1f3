#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "canids/can_log.hpp"

namespace canids {

struct EcuSpec {
  std::uint32_t can_id = 0;
  double period_ms = 10.0;
  std::uint64_t payload_seed = 0;
  std::uint8_t dlc = 8;
  double offset_ms = 0.0;  // phase of the first emission
};

struct BaselineProfile {
  std::vector<EcuSpec> ecus;
  double jitter_fraction = 0.0;  // of the period, in [0, 0.5]
  double duration = 60.0;        // seconds
  std::uint64_t seed = 7;
};

// Ten ECUs with periods between 5 and 100 ms over 60 s.
BaselineProfile default_baseline_profile();

void validate(const BaselineProfile& profile);

struct AttackSpec {
  AttackKind kind = AttackKind::DoS;
  double start = 0.0;
  double end = 0.0;
  double rate = 0.0;  // injected frames per second; unused by Suspension/Replay
  // Flood id (DoS) or target id (Spoofing, Suspension). DoS defaults to 0x000.
  std::optional<std::uint32_t> target_id;
  std::uint32_t range_lo = 0x700;  // Diagnostic id range, inclusive
  std::uint32_t range_hi = 0x7FF;
  double source_start = 0.0;  // Replay source interval [source_start, source_end)
  double source_end = 0.0;
  std::uint64_t seed = 7;
};

// Default injection rate (frames/s) for each kind.
double default_attack_rate(AttackKind kind);

// AttackSpec with the default rate and parameters for `kind`.
AttackSpec make_attack(AttackKind kind, double start, double end,
                       std::uint64_t seed = 7);

FrameLog generate_baseline(const BaselineProfile& profile);

FrameLog inject_dos(const FrameLog& log, const AttackSpec& spec);
FrameLog inject_fuzzy(const FrameLog& log, const AttackSpec& spec);
FrameLog inject_fuzzing_id(const FrameLog& log, const AttackSpec& spec);
FrameLog inject_fuzzing_payload(const FrameLog& log, const AttackSpec& spec);
FrameLog inject_spoofing(const FrameLog& log, const AttackSpec& spec);
FrameLog inject_diagnostic(const FrameLog& log, const AttackSpec& spec);
FrameLog inject_replay(const FrameLog& log, const AttackSpec& spec);
FrameLog inject_suspension(const FrameLog& log, const AttackSpec& spec);

// Dispatches on spec.kind.
FrameLog inject(const FrameLog& log, const AttackSpec& spec);

// Applies specs in order; their [start, end) intervals must not overlap.
FrameLog mix_attacks(const FrameLog& log, std::span<const AttackSpec> specs);

// Merges `injected` (any order) into a time-ordered log. Ties go to the lower
// can_id; on equal ids the original frame stays first.
FrameLog merge_injected(const FrameLog& log, std::vector<LabeledFrame> injected);

}  // namespace canids
