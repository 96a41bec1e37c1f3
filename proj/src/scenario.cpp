#include "canids/scenario.hpp"

#include <fstream>
#include <sstream>

#include "canids/error.hpp"
#include "json.hpp"

namespace canids {

namespace {

using nlohmann::json;

std::uint32_t parse_id(const json& v, const std::string& field) {
  if (v.is_number_unsigned()) return v.get<std::uint32_t>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    std::size_t used = 0;
    unsigned long id = 0;
    try {
      id = std::stoul(s, &used, 16);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == s.size() && used > 0 && id <= kExtendedIdMask) return static_cast<std::uint32_t>(id);
  }
  throw DataError("scenario field '" + field + "' must be a hex string or unsigned integer");
}

std::string hex_id(std::uint32_t id) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%03X", id);
  return buf;
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw DataError(std::string("scenario field '") + key + "' has the wrong type");
  }
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw DataError("unknown field '" + key + "' in " + where);
  }
}

BaselineProfile parse_baseline(const json& j) {
  if (!j.is_object()) throw DataError("'baseline' must be an object");
  reject_unknown(j, {"duration", "jitter_fraction", "seed", "ecus"}, "baseline");
  BaselineProfile p = default_baseline_profile();
  p.duration = get_or(j, "duration", p.duration);
  p.jitter_fraction = get_or(j, "jitter_fraction", p.jitter_fraction);
  p.seed = get_or<std::uint64_t>(j, "seed", p.seed);
  if (j.contains("ecus")) {
    const auto& ecus = j.at("ecus");
    if (!ecus.is_array()) throw DataError("'baseline.ecus' must be an array");
    p.ecus.clear();
    std::uint64_t i = 0;
    for (const auto& e : ecus) {
      if (!e.is_object() || !e.contains("id") || !e.contains("period_ms"))
        throw DataError("each ECU needs 'id' and 'period_ms'");
      reject_unknown(e, {"id", "period_ms", "payload_seed", "dlc", "offset_ms"}, "ecu");
      EcuSpec ecu;
      ecu.can_id = parse_id(e.at("id"), "ecu.id");
      ecu.period_ms = get_or(e, "period_ms", 0.0);
      ecu.payload_seed = get_or<std::uint64_t>(e, "payload_seed", ++i);
      ecu.dlc = static_cast<std::uint8_t>(get_or<unsigned>(e, "dlc", 8));
      ecu.offset_ms = get_or(e, "offset_ms", 0.0);
      p.ecus.push_back(ecu);
    }
  }
  try {
    validate(p);
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("baseline: ") + e.what());
  }
  return p;
}

AttackSpec parse_attack(const json& j, std::uint64_t default_seed) {
  if (!j.is_object()) throw DataError("each attack must be an object");
  reject_unknown(j, {"kind", "start", "end", "rate", "target_id", "range", "source", "seed"},
                 "attack");
  if (!j.contains("kind") || !j.contains("start") || !j.contains("end"))
    throw DataError("each attack needs 'kind', 'start' and 'end'");
  const auto kind_text = get_or<std::string>(j, "kind", "");
  const auto kind = parse_attack_kind(kind_text);
  if (!kind) throw DataError("unknown attack kind '" + kind_text + "'");
  AttackSpec s = make_attack(*kind, get_or(j, "start", 0.0), get_or(j, "end", 0.0),
                             get_or<std::uint64_t>(j, "seed", default_seed));
  s.rate = get_or(j, "rate", s.rate);
  if (j.contains("target_id")) s.target_id = parse_id(j.at("target_id"), "target_id");
  if (j.contains("range")) {
    const auto& r = j.at("range");
    if (!r.is_array() || r.size() != 2) throw DataError("'range' must be [lo, hi]");
    s.range_lo = parse_id(r[0], "range[0]");
    s.range_hi = parse_id(r[1], "range[1]");
  }
  if (j.contains("source")) {
    const auto& r = j.at("source");
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
      throw DataError("'source' must be [start, end] in seconds");
    s.source_start = r[0].get<double>();
    s.source_end = r[1].get<double>();
  }
  return s;
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("scenario must be a JSON object");
  reject_unknown(j, {"baseline", "attacks", "seed"}, "scenario");
  Scenario s;
  const auto seed = get_or<std::uint64_t>(j, "seed", 7);
  s.baseline.seed = seed;
  if (j.contains("baseline")) {
    json b = j.at("baseline");
    if (b.is_object() && !b.contains("seed")) b["seed"] = seed;
    s.baseline = parse_baseline(b);
  }
  if (j.contains("attacks")) {
    const auto& attacks = j.at("attacks");
    if (!attacks.is_array()) throw DataError("'attacks' must be an array");
    for (std::size_t i = 0; i < attacks.size(); ++i)
      s.attacks.push_back(parse_attack(attacks[i], seed + i));
  }
  return s;
}

Scenario read_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["seed"] = s.baseline.seed;
  json b;
  b["duration"] = s.baseline.duration;
  b["jitter_fraction"] = s.baseline.jitter_fraction;
  b["seed"] = s.baseline.seed;
  b["ecus"] = json::array();
  for (const auto& e : s.baseline.ecus)
    b["ecus"].push_back({{"id", hex_id(e.can_id)},
                         {"period_ms", e.period_ms},
                         {"payload_seed", e.payload_seed},
                         {"dlc", e.dlc},
                         {"offset_ms", e.offset_ms}});
  j["baseline"] = b;
  j["attacks"] = json::array();
  for (const auto& a : s.attacks) {
    json aj{{"kind", std::string(to_string(a.kind))},
            {"start", a.start},
            {"end", a.end},
            {"rate", a.rate},
            {"seed", a.seed}};
    if (a.target_id) aj["target_id"] = hex_id(*a.target_id);
    if (a.kind == AttackKind::Diagnostic) aj["range"] = {hex_id(a.range_lo), hex_id(a.range_hi)};
    if (a.kind == AttackKind::Replay) aj["source"] = {a.source_start, a.source_end};
    j["attacks"].push_back(aj);
  }
  return j.dump(2);
}

FrameLog run_scenario(const Scenario& scenario) {
  FrameLog base = generate_baseline(scenario.baseline);
  return mix_attacks(base, scenario.attacks);
}

std::uint32_t fastest_ecu(const BaselineProfile& profile) {
  if (profile.ecus.empty()) throw InvalidArgument("profile has no ECUs");
  const EcuSpec* best = &profile.ecus.front();
  for (const auto& e : profile.ecus)
    if (e.period_ms < best->period_ms ||
        (e.period_ms == best->period_ms && e.can_id < best->can_id))
      best = &e;
  return best->can_id;
}

Scenario single_attack_scenario(AttackKind kind, std::uint64_t seed) {
  Scenario sc;
  sc.baseline.seed = seed;
  AttackSpec a = make_attack(kind, 20.0, 40.0, seed);
  if (kind == AttackKind::Spoofing || kind == AttackKind::Suspension)
    a.target_id = fastest_ecu(sc.baseline);
  sc.attacks.push_back(a);
  return sc;
}

Scenario mixed_scenario(std::uint64_t seed) {
  Scenario sc;
  sc.baseline.seed = seed;
  const AttackKind kinds[] = {AttackKind::DoS, AttackKind::Fuzzy, AttackKind::Spoofing,
                              AttackKind::Replay};
  double start = 12.0;
  std::uint64_t k = 0;
  for (AttackKind kind : kinds) {
    AttackSpec a = make_attack(kind, start, start + 8.0, seed + k++);
    if (kind == AttackKind::Spoofing) a.target_id = fastest_ecu(sc.baseline);
    if (kind == AttackKind::Replay) {
      // Attack-free source so the replay never copies injected frames.
      a.source_start = 2.0;
      a.source_end = 10.0;
    }
    sc.attacks.push_back(a);
    start += 12.0;
  }
  return sc;
}

}  // namespace canids
