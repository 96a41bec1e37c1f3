#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace canids {

enum class Label : std::uint8_t { Normal, Injected };

enum class AttackKind : std::uint8_t {
  DoS,
  Fuzzy,
  FuzzingId,
  FuzzingPayload,
  Spoofing,
  Diagnostic,
  Replay,
  Suspension,
};

inline constexpr std::size_t kAttackKindCount = 8;

std::string_view to_string(AttackKind kind);
// Accepts the enum spelling ("FuzzingId") and snake case ("fuzzing_id").
std::optional<AttackKind> parse_attack_kind(std::string_view text);

inline constexpr std::uint32_t kStandardIdMask = 0x7FF;
inline constexpr std::uint32_t kExtendedIdMask = 0x1FFFFFFF;
inline constexpr std::uint8_t kMaxDlc = 8;

// One CAN data frame with its ground-truth label.
struct LabeledFrame {
  double timestamp = 0.0;  // seconds
  std::uint32_t can_id = 0;
  bool extended = false;  // set when the id needs more than 11 bits
  std::uint8_t dlc = 0;
  std::array<std::uint8_t, kMaxDlc> data{};
  Label label = Label::Normal;
  std::optional<AttackKind> attack_kind;

  std::span<const std::uint8_t> payload() const { return {data.data(), dlc}; }

  friend bool operator==(const LabeledFrame&, const LabeledFrame&) = default;
};

LabeledFrame make_frame(double timestamp, std::uint32_t can_id,
                        std::span<const std::uint8_t> payload,
                        Label label = Label::Normal,
                        std::optional<AttackKind> kind = std::nullopt);

// Interval during which a target ECU was silenced. Suspension removes frames,
// so there is nothing left to carry a label; windows are labeled from this.
struct SuspensionInterval {
  std::uint32_t can_id = 0;
  double start = 0.0;
  double end = 0.0;

  friend bool operator==(const SuspensionInterval&,
                         const SuspensionInterval&) = default;
};

struct FrameLog {
  std::vector<LabeledFrame> frames;
  std::string source;
  int id_width = 11;
  std::vector<SuspensionInterval> suspensions;

  bool empty() const { return frames.empty(); }
  std::size_t size() const { return frames.size(); }
};

// Throws DataError when a frame or the ordering invariant is broken.
void validate(const FrameLog& log);

// `timestamp,can_id_hex,dlc,b0,...,b{dlc-1},flag` with flag R (normal) or T
// (injected). A header line is optional. Lines starting with '#' are
// comments; `# suspension id=<hex> start=<s> end=<s>` restores suspension
// metadata written by write_dataset_csv.
FrameLog parse_dataset_csv(std::istream& in, std::string source = "<stream>");
FrameLog parse_dataset_csv_text(std::string_view text,
                                std::string source = "<string>");

// `(ts) ifname ID#DATA` lines; every frame is labeled Normal.
FrameLog parse_candump(std::istream& in, std::string source = "<stream>");
FrameLog parse_candump_text(std::string_view text,
                            std::string source = "<string>");

// Writes data lines only, '\n' terminated, timestamps with 6 fractional
// digits. `comments` are emitted first as '# ' lines.
void write_dataset_csv(const FrameLog& log, std::ostream& out,
                       std::span<const std::string> comments = {});
std::string to_dataset_csv(const FrameLog& log);

FrameLog read_log_file(const std::string& path);

}  // namespace canids
