#pragma once

// FAEF v1 feature files.
//
// Layout (little-endian):
//   0   char[4]  magic "FAEF"
//   4   u32      version = 1
//   8   f64      frame_rate_hz
//   16  u32      dim
//   20  u64      frames
//   28  f32[frames * dim], row-major (one row per time frame)
//
// Values are held as doubles in memory and narrowed to f32 on write, so
// read(write(m)) == m whenever m's values are f32-representable, which holds
// for everything produced by the reader or the synthetic generator.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "msaprobe/matrix.h"

namespace msaprobe {

inline constexpr std::size_t kFaefHeaderBytes = 28;
inline constexpr std::uint32_t kFaefVersion = 1;

struct FeatureMatrix {
  double frame_rate_hz = 0.0;
  Matrix data;  // frames x dim

  std::size_t frames() const { return data.rows(); }
  std::size_t dim() const { return data.cols(); }
  double duration_s() const { return static_cast<double>(frames()) / frame_rate_hz; }
};

/// Throws ValidationError for a non-positive frame rate, an empty matrix, or
/// non-finite values.
void validate(const FeatureMatrix& m);

/// Throws ValidationError unless the frame count is within +-2 of
/// duration_s * frame_rate_hz.
void check_duration(const FeatureMatrix& m, double duration_s);

std::uint64_t write_features(const FeatureMatrix& m, std::ostream& sink);
FeatureMatrix read_features(std::istream& source);

void save_features(const FeatureMatrix& m, const std::string& path);
FeatureMatrix load_features(const std::string& path);

/// Optional `<name>.faef.json` metadata written by the extractor.
struct FeatureSidecar {
  std::string model_id;
  std::optional<int> layer;
  std::string source_audio;
  std::string extraction_tool_version;
};

std::string sidecar_path(const std::string& faef_path);
void save_sidecar(const FeatureSidecar& s, const std::string& faef_path);
/// Returns nullopt when no sidecar exists next to `faef_path`.
std::optional<FeatureSidecar> load_sidecar(const std::string& faef_path);

}  // namespace msaprobe
