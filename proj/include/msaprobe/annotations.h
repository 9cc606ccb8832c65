#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace msaprobe {

inline constexpr int kNumClasses = 7;
inline constexpr double kLabelRateHz = 2.0;

/// The seven section functions. The numeric order is also the order of the
/// probe's function channels.
enum class FunctionClass : std::uint8_t {
  kIntro = 0,
  kVerse = 1,
  kChorus = 2,
  kBridge = 3,
  kInst = 4,
  kOutro = 5,
  kSilence = 6,
};

inline constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "intro", "verse", "chorus", "bridge", "inst", "outro", "silence"};

std::string_view class_name(FunctionClass c);
std::optional<FunctionClass> class_from_name(std::string_view name);
inline int class_id(FunctionClass c) { return static_cast<int>(c); }
FunctionClass class_from_id(int id);

struct Segment {
  double start_s = 0.0;
  FunctionClass function = FunctionClass::kIntro;

  bool operator==(const Segment&) const = default;
};

/// Contiguous, non-overlapping segments starting at 0; segment i ends where
/// i+1 starts and the last one ends at `duration_s`.
struct SegmentAnnotation {
  std::vector<Segment> segments;
  double duration_s = 0.0;

  bool operator==(const SegmentAnnotation&) const = default;
};

/// Throws ValidationError unless `ann` satisfies the SegmentAnnotation
/// invariants.
void validate(const SegmentAnnotation& ann);

/// Class of the segment covering time `t`. Times at or past the end fall in
/// the last segment.
FunctionClass class_at(const SegmentAnnotation& ann, double t);

/// Raw-label to function-class table.
///
/// Patterns ending in `*` match by prefix, all others match exactly. Exact
/// matches win over prefixes, and longer prefixes win over shorter ones.
/// Labels that match nothing fall back to `fallback()`.
class LabelMap {
 public:
  /// Built-in table, versioned as `default_version()`.
  static const LabelMap& defaults();
  static std::string_view default_version() { return "msa7-default-v1"; }

  /// Loads a JSON object {pattern: class-name}. An optional "__fallback__"
  /// key overrides the fallback class.
  static LabelMap from_json(std::string_view json_text);

  void add(std::string pattern, FunctionClass c);
  void set_fallback(FunctionClass c) { fallback_ = c; }
  FunctionClass fallback() const { return fallback_; }

  /// Lowercases, strips trailing digits and underscores, then looks the
  /// result up.
  FunctionClass map(std::string_view raw) const;

 private:
  struct Entry {
    std::string pattern;
    bool prefix;
    FunctionClass function;
  };
  std::vector<Entry> entries_;
  FunctionClass fallback_ = FunctionClass::kInst;
};

/// Maps a raw label through the default table.
FunctionClass map_label(std::string_view raw);

/// Lowercase and strip trailing digits/underscores ("Verse_2" -> "verse").
std::string normalize_label(std::string_view raw);

/// Parses "start_seconds label" lines terminated by a line whose label is
/// `end`. Blank lines and lines starting with `#` are skipped; CRLF is
/// accepted.
SegmentAnnotation parse_annotation(std::string_view text, const LabelMap& labels = LabelMap::defaults());

/// Writes the annotation in the format read by parse_annotation, using
/// canonical class names and shortest round-trip number formatting.
std::string serialize_annotation(const SegmentAnnotation& ann);

SegmentAnnotation load_annotation(const std::string& path, const LabelMap& labels = LabelMap::defaults());

/// Per-frame training targets at the 2 Hz label rate.
struct FrameTargets {
  std::vector<std::uint8_t> boundary;
  std::vector<std::uint8_t> function;

  std::size_t frames() const { return boundary.size(); }
  bool operator==(const FrameTargets&) const = default;
};

/// Number of label frames covering `duration_s`: ceil(duration_s * 2).
std::size_t label_frame_count(double duration_s);

FrameTargets rasterize(const SegmentAnnotation& ann);

/// [0, interior segment starts..., duration_s].
std::vector<double> boundaries_of(const SegmentAnnotation& ann);

}  // namespace msaprobe
