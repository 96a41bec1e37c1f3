#include "canids/can_log.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "canids/error.hpp"

namespace canids {

namespace {

constexpr std::array<std::string_view, kAttackKindCount> kKindNames = {
    "DoS",      "Fuzzy",      "FuzzingId", "FuzzingPayload",
    "Spoofing", "Diagnostic", "Replay",    "Suspension"};
constexpr std::array<std::string_view, kAttackKindCount> kKindSnake = {
    "dos",      "fuzzy",      "fuzzing_id", "fuzzing_payload",
    "spoofing", "diagnostic", "replay",     "suspension"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() ||
      !std::isfinite(v))
    return std::nullopt;
  return v;
}

std::optional<std::uint32_t> parse_hex(std::string_view s) {
  s = trim(s);
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X'))
    s.remove_prefix(2);
  if (s.empty()) return std::nullopt;
  std::uint32_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::uint32_t> parse_uint(std::string_view s) {
  s = trim(s);
  std::uint32_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    return std::nullopt;
  return v;
}

std::string quoted(std::string_view s) { return "'" + std::string(s) + "'"; }

std::string format_ts(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", t);
  return buf;
}

// Shared per-line bookkeeping for both text formats.
class LogBuilder {
 public:
  explicit LogBuilder(std::string source) { log_.source = std::move(source); }

  void add(std::size_t line_no, std::string_view id_text, std::uint32_t id,
           LabeledFrame frame) {
    if (id > kExtendedIdMask)
      throw ParseError(line_no, "can_id out of range " + quoted(id_text));
    frame.can_id = id;
    frame.extended = id > kStandardIdMask;
    if (frame.extended) log_.id_width = 29;
    if (frame.timestamp < 0.0)
      throw ParseError(line_no, "negative timestamp " + format_ts(frame.timestamp));
    if (!log_.frames.empty() && frame.timestamp < log_.frames.back().timestamp)
      throw ParseError(line_no, "timestamp decreased from " +
                                    format_ts(log_.frames.back().timestamp) +
                                    " to " + format_ts(frame.timestamp));
    log_.frames.push_back(frame);
  }

  void add_suspension(std::size_t line_no, std::string_view directive) {
    SuspensionInterval s;
    bool have_id = false, have_start = false, have_end = false;
    for (auto token : split(trim(directive), ' ')) {
      token = trim(token);
      if (token.empty()) continue;
      const auto eq = token.find('=');
      if (eq == std::string_view::npos)
        throw ParseError(line_no, "bad suspension field " + quoted(token));
      const auto key = token.substr(0, eq);
      const auto value = token.substr(eq + 1);
      if (key == "id") {
        const auto id = parse_hex(value);
        if (!id) throw ParseError(line_no, "bad suspension id " + quoted(value));
        s.can_id = *id;
        have_id = true;
      } else if (key == "start" || key == "end") {
        const auto v = parse_double(value);
        if (!v) throw ParseError(line_no, "bad suspension " + std::string(key));
        (key == "start" ? s.start : s.end) = *v;
        (key == "start" ? have_start : have_end) = true;
      } else {
        throw ParseError(line_no, "unknown suspension field " + quoted(key));
      }
    }
    if (!have_id || !have_start || !have_end || !(s.start < s.end))
      throw ParseError(line_no, "incomplete suspension directive");
    log_.suspensions.push_back(s);
  }

  FrameLog finish() && { return std::move(log_); }

 private:
  FrameLog log_;
};

// Handles '#' comment lines. Returns true when the line was consumed.
bool handle_comment(std::string_view line, std::size_t line_no,
                    LogBuilder& builder) {
  if (line.empty() || line.front() != '#') return false;
  auto body = trim(line.substr(1));
  constexpr std::string_view kSuspension = "suspension ";
  if (body.substr(0, kSuspension.size()) == kSuspension)
    builder.add_suspension(line_no, body.substr(kSuspension.size()));
  return true;
}

template <typename LineFn>
void for_each_line(std::istream& in, LineFn&& fn) {
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line_no, line);
  }
}

}  // namespace

std::string_view to_string(AttackKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<AttackKind> parse_attack_kind(std::string_view text) {
  for (std::size_t i = 0; i < kAttackKindCount; ++i) {
    if (text == kKindNames[i] || text == kKindSnake[i])
      return static_cast<AttackKind>(i);
  }
  return std::nullopt;
}

LabeledFrame make_frame(double timestamp, std::uint32_t can_id,
                        std::span<const std::uint8_t> payload, Label label,
                        std::optional<AttackKind> kind) {
  if (payload.size() > kMaxDlc)
    throw InvalidArgument("payload longer than 8 bytes");
  if (can_id > kExtendedIdMask) throw InvalidArgument("can_id exceeds 29 bits");
  LabeledFrame f;
  f.timestamp = timestamp;
  f.can_id = can_id;
  f.extended = can_id > kStandardIdMask;
  f.dlc = static_cast<std::uint8_t>(payload.size());
  std::copy(payload.begin(), payload.end(), f.data.begin());
  f.label = label;
  f.attack_kind = kind;
  return f;
}

void validate(const FrameLog& log) {
  if (log.id_width != 11 && log.id_width != 29)
    throw DataError("id_width must be 11 or 29");
  const std::uint32_t mask =
      log.id_width == 11 ? kStandardIdMask : kExtendedIdMask;
  for (std::size_t i = 0; i < log.frames.size(); ++i) {
    const auto& f = log.frames[i];
    if (f.dlc > kMaxDlc)
      throw DataError("frame " + std::to_string(i) + ": dlc > 8");
    if (f.can_id > mask)
      throw DataError("frame " + std::to_string(i) + ": can_id exceeds id width");
    if (!(f.timestamp >= 0.0) || !std::isfinite(f.timestamp))
      throw DataError("frame " + std::to_string(i) + ": bad timestamp");
    if (i > 0 && f.timestamp < log.frames[i - 1].timestamp)
      throw DataError("frame " + std::to_string(i) + ": timestamp decreased from " +
                      format_ts(log.frames[i - 1].timestamp) + " to " +
                      format_ts(f.timestamp));
  }
}

FrameLog parse_dataset_csv(std::istream& in, std::string source) {
  LogBuilder builder(std::move(source));
  bool seen_record = false;
  for_each_line(in, [&](std::size_t line_no, std::string_view line) {
    if (trim(line).empty() || handle_comment(line, line_no, builder)) return;
    const auto fields = split(line, ',');
    if (!seen_record) {
      seen_record = true;
      // Optional header: first record whose timestamp is not numeric.
      if (!parse_double(fields[0])) return;
    }
    if (fields.size() < 4)
      throw ParseError(line_no, "expected at least 4 fields, got " +
                                    std::to_string(fields.size()));
    LabeledFrame frame;
    const auto ts = parse_double(fields[0]);
    if (!ts) throw ParseError(line_no, "bad timestamp " + quoted(fields[0]));
    frame.timestamp = *ts;
    const auto id = parse_hex(fields[1]);
    if (!id) throw ParseError(line_no, "bad can_id " + quoted(fields[1]));
    const auto dlc = parse_uint(fields[2]);
    if (!dlc || *dlc > kMaxDlc)
      throw ParseError(line_no, "bad dlc " + quoted(fields[2]));
    frame.dlc = static_cast<std::uint8_t>(*dlc);
    if (fields.size() != 4 + *dlc)
      throw ParseError(line_no, "payload arity mismatch at line " +
                                    std::to_string(line_no) + ": dlc=" +
                                    std::to_string(*dlc) + " but " +
                                    std::to_string(fields.size() - 4) +
                                    " data fields");
    for (std::uint32_t i = 0; i < *dlc; ++i) {
      const auto b = parse_hex(fields[3 + i]);
      if (!b || *b > 0xFF || trim(fields[3 + i]).size() > 2)
        throw ParseError(line_no, "bad data byte b" + std::to_string(i) + " " +
                                      quoted(fields[3 + i]));
      frame.data[i] = static_cast<std::uint8_t>(*b);
    }
    const auto flag = trim(fields.back());
    if (flag == "R" || flag == "r") {
      frame.label = Label::Normal;
    } else if (flag == "T" || flag == "t") {
      frame.label = Label::Injected;
    } else {
      throw ParseError(line_no, "bad flag " + quoted(flag) + " (expected R or T)");
    }
    builder.add(line_no, fields[1], *id, frame);
  });
  return std::move(builder).finish();
}

FrameLog parse_dataset_csv_text(std::string_view text, std::string source) {
  std::istringstream in{std::string(text)};
  return parse_dataset_csv(in, std::move(source));
}

FrameLog parse_candump(std::istream& in, std::string source) {
  LogBuilder builder(std::move(source));
  for_each_line(in, [&](std::size_t line_no, std::string_view raw) {
    const auto line = trim(raw);
    if (line.empty() || handle_comment(line, line_no, builder)) return;
    if (line.front() != '(')
      throw ParseError(line_no, "expected '(timestamp)'");
    const auto close = line.find(')');
    if (close == std::string_view::npos)
      throw ParseError(line_no, "unterminated timestamp");
    LabeledFrame frame;
    const auto ts = parse_double(line.substr(1, close - 1));
    if (!ts)
      throw ParseError(line_no, "bad timestamp " +
                                    quoted(line.substr(1, close - 1)));
    frame.timestamp = *ts;

    auto rest = trim(line.substr(close + 1));
    const auto space = rest.find_first_of(" \t");
    if (space == std::string_view::npos)
      throw ParseError(line_no, "missing interface name or frame");
    auto body = trim(rest.substr(space + 1));
    // Tolerate a trailing annotation after the frame token.
    body = body.substr(0, body.find_first_of(" \t"));
    const auto hash = body.find('#');
    if (hash == std::string_view::npos)
      throw ParseError(line_no, "missing '#' in frame " + quoted(body));
    const auto id_text = body.substr(0, hash);
    const auto id = parse_hex(id_text);
    if (!id || id_text.size() > 8)
      throw ParseError(line_no, "bad can_id " + quoted(id_text));
    auto data = body.substr(hash + 1);
    if (!data.empty() && data.front() == '#')
      throw ParseError(line_no, "CAN FD frames are not supported");
    if (!data.empty() && (data.front() == 'R' || data.front() == 'r'))
      data = {};  // remote frame, no payload
    if (data.size() % 2 != 0)
      throw ParseError(line_no, "odd number of payload hex digits");
    if (data.size() / 2 > kMaxDlc)
      throw ParseError(line_no, "payload longer than 8 bytes");
    frame.dlc = static_cast<std::uint8_t>(data.size() / 2);
    for (std::size_t i = 0; i < frame.dlc; ++i) {
      const auto b = parse_hex(data.substr(2 * i, 2));
      if (!b)
        throw ParseError(line_no, "bad data byte " + quoted(data.substr(2 * i, 2)));
      frame.data[i] = static_cast<std::uint8_t>(*b);
    }
    builder.add(line_no, id_text, *id, frame);
  });
  return std::move(builder).finish();
}

FrameLog parse_candump_text(std::string_view text, std::string source) {
  std::istringstream in{std::string(text)};
  return parse_candump(in, std::move(source));
}

void write_dataset_csv(const FrameLog& log, std::ostream& out,
                       std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  for (const auto& s : log.suspensions) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "# suspension id=%04X start=%.6f end=%.6f\n",
                  s.can_id, s.start, s.end);
    out << buf;
  }
  char buf[160];
  for (const auto& f : log.frames) {
    int n = std::snprintf(buf, sizeof buf, f.extended ? "%.6f,%08X,%u" : "%.6f,%04X,%u",
                          f.timestamp, f.can_id, static_cast<unsigned>(f.dlc));
    for (std::size_t i = 0; i < f.dlc; ++i)
      n += std::snprintf(buf + n, sizeof buf - n, ",%02x", f.data[i]);
    std::snprintf(buf + n, sizeof buf - n, ",%c\n",
                  f.label == Label::Injected ? 'T' : 'R');
    out << buf;
  }
  if (!out) throw DataError("write failed");
}

std::string to_dataset_csv(const FrameLog& log) {
  std::ostringstream out;
  write_dataset_csv(log, out);
  return out.str();
}

FrameLog read_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  // Sniff the first meaningful line to pick the grammar.
  std::string line;
  bool candump = false;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    candump = t.front() == '(';
    break;
  }
  in.clear();
  in.seekg(0);
  return candump ? parse_candump(in, path) : parse_dataset_csv(in, path);
}

}  // namespace canids
