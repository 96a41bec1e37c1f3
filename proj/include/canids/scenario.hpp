#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "canids/traffic_synth.hpp"

namespace canids {

// Baseline profile plus an ordered list of attacks; see docs/scenario.md.
struct Scenario {
  BaselineProfile baseline = default_baseline_profile();
  std::vector<AttackSpec> attacks;
};

Scenario parse_scenario(std::string_view json_text);
Scenario read_scenario_file(const std::string& path);
std::string scenario_to_json(const Scenario& scenario);

// Baseline with the attacks mixed in.
FrameLog run_scenario(const Scenario& scenario);

// Shortest-period ECU of the profile (lowest id on ties).
std::uint32_t fastest_ecu(const BaselineProfile& profile);

// Default profile with one attack at its default rate over [20, 40) s.
// Spoofing and suspension target the fastest ECU.
Scenario single_attack_scenario(AttackKind kind, std::uint64_t seed = 7);

// DoS, fuzzy, spoofing and replay in disjoint 8 s slots of one capture.
Scenario mixed_scenario(std::uint64_t seed = 7);

}  // namespace canids
