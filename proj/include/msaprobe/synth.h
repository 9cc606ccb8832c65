#pragma once

#include <cstdint>
#include <utility>

#include "msaprobe/annotations.h"
#include "msaprobe/feature_store.h"

namespace msaprobe {

/// Synthetic track generator for desk-scale runs without audio.
///
/// Each class owns a unit-norm mean vector drawn from `palette_seed`, so all
/// tracks generated with the same palette share class geometry. Every frame
/// is its segment's class mean plus N(0, noise_std^2) noise. Rows covering the
/// label frame of an interior segment start additionally get
/// `boundary_marker` times a fixed unit "transition" vector; set it to 0 for
/// pure class-mean tracks.
struct SynthConfig {
  std::size_t dim = 16;
  double frame_rate_hz = 2.0;
  int min_segments = 4;
  int max_segments = 8;
  double min_segment_s = 10.0;
  double max_segment_s = 40.0;
  int class_count = kNumClasses;
  double noise_std = 0.3;
  double boundary_marker = 4.0;
  std::uint64_t palette_seed = 0;
  std::uint64_t seed = 0;
};

void validate(const SynthConfig& cfg);

/// class_count x dim matrix of unit-norm, pairwise distinct class means,
/// followed by one extra row holding the transition vector.
Matrix synth_palette(std::size_t dim, int class_count, std::uint64_t palette_seed);

std::pair<FeatureMatrix, SegmentAnnotation> synth_track(const SynthConfig& cfg);

}  // namespace msaprobe
