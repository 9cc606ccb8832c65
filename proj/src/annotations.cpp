#include "msaprobe/annotations.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "msaprobe/errors.h"

namespace msaprobe {

std::string_view class_name(FunctionClass c) { return kClassNames.at(class_id(c)); }

std::optional<FunctionClass> class_from_name(std::string_view name) {
  for (int i = 0; i < kNumClasses; ++i) {
    if (kClassNames[i] == name) return static_cast<FunctionClass>(i);
  }
  return std::nullopt;
}

FunctionClass class_from_id(int id) {
  if (id < 0 || id >= kNumClasses) throw ValidationError("class id out of range: " + std::to_string(id));
  return static_cast<FunctionClass>(id);
}

void validate(const SegmentAnnotation& ann) {
  if (ann.segments.empty()) throw ValidationError("annotation has no segments");
  if (!(std::isfinite(ann.duration_s) && ann.duration_s > 0.0)) {
    throw ValidationError("annotation duration must be positive");
  }
  if (ann.segments.front().start_s != 0.0) throw ValidationError("first segment must start at 0");
  for (std::size_t i = 1; i < ann.segments.size(); ++i) {
    if (!(ann.segments[i].start_s > ann.segments[i - 1].start_s)) {
      throw ValidationError("segment start times must be strictly ascending (segment " + std::to_string(i) + ")");
    }
  }
  if (!(ann.segments.back().start_s < ann.duration_s)) {
    throw ValidationError("last segment starts at or after the end time");
  }
}

FunctionClass class_at(const SegmentAnnotation& ann, double t) {
  // First segment whose start is > t, then step back one.
  auto it = std::upper_bound(ann.segments.begin(), ann.segments.end(), t,
                             [](double value, const Segment& s) { return value < s.start_s; });
  if (it == ann.segments.begin()) return ann.segments.front().function;
  return std::prev(it)->function;
}

// ---------------------------------------------------------------------------
// Label mapping

std::string normalize_label(std::string_view raw) {
  std::string out(raw);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  while (!out.empty() && (std::isdigit(static_cast<unsigned char>(out.back())) || out.back() == '_')) {
    out.pop_back();
  }
  return out;
}

void LabelMap::add(std::string pattern, FunctionClass c) {
  bool prefix = !pattern.empty() && pattern.back() == '*';
  if (prefix) pattern.pop_back();
  if (pattern.empty()) throw ValidationError("empty label pattern");
  entries_.push_back({std::move(pattern), prefix, c});
}

FunctionClass LabelMap::map(std::string_view raw) const {
  const std::string label = normalize_label(raw);
  const Entry* best = nullptr;
  for (const Entry& e : entries_) {
    if (!e.prefix) {
      if (e.pattern == label) return e.function;
      continue;
    }
    if (label.starts_with(e.pattern) && (best == nullptr || e.pattern.size() > best->pattern.size())) {
      best = &e;
    }
  }
  return best ? best->function : fallback_;
}

const LabelMap& LabelMap::defaults() {
  static const LabelMap table = [] {
    LabelMap m;
    using F = FunctionClass;
    for (auto p : {"intro*", "fadein"}) m.add(p, F::kIntro);
    for (auto p : {"verse*", "prechorus*"}) m.add(p, F::kVerse);
    for (auto p : {"chorus*", "refrain*", "hook*"}) m.add(p, F::kChorus);
    for (auto p : {"bridge*", "transition*"}) m.add(p, F::kBridge);
    for (auto p : {"inst*", "solo*", "break*", "drop*"}) m.add(p, F::kInst);
    for (auto p : {"outro*", "fadeout", "end"}) m.add(p, F::kOutro);
    for (auto p : {"silence", "quiet"}) m.add(p, F::kSilence);
    m.set_fallback(F::kInst);
    return m;
  }();
  return table;
}

LabelMap LabelMap::from_json(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("label map: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("label map must be a JSON object");
  LabelMap m;
  for (const auto& [pattern, value] : doc.items()) {
    if (!value.is_string()) throw ValidationError("label map value for '" + pattern + "' is not a string");
    auto c = class_from_name(value.get<std::string>());
    if (!c) throw ValidationError("label map: unknown class '" + value.get<std::string>() + "'");
    if (pattern == "__fallback__") {
      m.set_fallback(*c);
    } else {
      m.add(pattern, *c);
    }
  }
  return m;
}

FunctionClass map_label(std::string_view raw) { return LabelMap::defaults().map(raw); }

// ---------------------------------------------------------------------------
// Text format

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n\v\f";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string format_seconds(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

SegmentAnnotation parse_annotation(std::string_view text, const LabelMap& labels) {
  SegmentAnnotation ann;
  bool ended = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (ended) throw ValidationError("line " + std::to_string(line_no) + ": content after the 'end' line");

    auto fields = split_ws(line);
    if (fields.size() != 2) throw ParseError(line_no, "expected '<seconds> <label>'");

    double t = 0.0;
    auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), t);
    if (ec != std::errc() || ptr != fields[0].data() + fields[0].size() || !std::isfinite(t) || t < 0.0) {
      throw ParseError(line_no, "invalid time '" + std::string(fields[0]) + "'");
    }
    if (!ann.segments.empty() && !(t > ann.segments.back().start_s)) {
      throw ValidationError("line " + std::to_string(line_no) + ": time " + std::string(fields[0]) +
                            " is not after the previous start time");
    }
    if (fields[1] == "end") {
      ann.duration_s = t;
      ended = true;
    } else {
      ann.segments.push_back({t, labels.map(fields[1])});
    }
  }
  if (!ended) throw ValidationError("missing 'end' line");
  validate(ann);
  return ann;
}

std::string serialize_annotation(const SegmentAnnotation& ann) {
  std::string out;
  for (const Segment& s : ann.segments) {
    out += format_seconds(s.start_s);
    out += ' ';
    out += class_name(s.function);
    out += '\n';
  }
  out += format_seconds(ann.duration_s);
  out += " end\n";
  return out;
}

SegmentAnnotation load_annotation(const std::string& path, const LabelMap& labels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open annotation file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_annotation(ss.str(), labels);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Rasterization

std::size_t label_frame_count(double duration_s) {
  return static_cast<std::size_t>(std::ceil(duration_s * kLabelRateHz));
}

FrameTargets rasterize(const SegmentAnnotation& ann) {
  const std::size_t frames = label_frame_count(ann.duration_s);
  FrameTargets out;
  out.boundary.assign(frames, 0);
  out.function.resize(frames);

  // Frame centers are visited in order, so walk the segment list once.
  std::size_t seg = 0;
  for (std::size_t k = 0; k < frames; ++k) {
    const double center = (static_cast<double>(k) + 0.5) / kLabelRateHz;
    while (seg + 1 < ann.segments.size() && ann.segments[seg + 1].start_s <= center) ++seg;
    out.function[k] = static_cast<std::uint8_t>(class_id(ann.segments[seg].function));
  }
  for (const Segment& s : ann.segments) {
    const double k = std::round(s.start_s * kLabelRateHz);
    const auto idx = static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(frames - 1)));
    out.boundary[idx] = 1;
  }
  return out;
}

std::vector<double> boundaries_of(const SegmentAnnotation& ann) {
  std::vector<double> out;
  out.reserve(ann.segments.size() + 1);
  for (const Segment& s : ann.segments) out.push_back(s.start_s);
  out.push_back(ann.duration_s);
  return out;
}

}  // namespace msaprobe
