#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "msaprobe/errors.h"
#include "msaprobe/feature_store.h"
#include "msaprobe/segmentation.h"
#include "msaprobe/synth.h"
#include "oracles.h"

using namespace msaprobe;

namespace {

std::string encode(const FeatureMatrix& m) {
  std::ostringstream out(std::ios::binary);
  write_features(m, out);
  return out.str();
}

FeatureMatrix decode(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return read_features(in);
}

std::uint64_t format_error_offset(const std::string& bytes) {
  try {
    decode(bytes);
  } catch (const FormatError& e) {
    return e.offset();
  }
  FAIL("expected a format error");
  return 0;
}

FeatureMatrix f32_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double fr) {
  FeatureMatrix m{fr, oracle::random_matrix(rng, rows, cols, 3.0)};
  for (double& v : m.data.values()) v = static_cast<float>(v);
  return m;
}

}  // namespace

TEST_CASE("FAEF header layout") {
  const FeatureMatrix m{2.0, Matrix(1, 1, 0.0)};
  std::ostringstream out(std::ios::binary);
  CHECK(write_features(m, out) == 32);
  const std::string b = out.str();
  REQUIRE(b.size() == kFaefHeaderBytes + 4);
  CHECK(b.substr(0, 4) == "FAEF");
  std::uint32_t version;
  double fr;
  std::uint32_t dim;
  std::uint64_t frames;
  std::memcpy(&version, b.data() + 4, 4);
  std::memcpy(&fr, b.data() + 8, 8);
  std::memcpy(&dim, b.data() + 16, 4);
  std::memcpy(&frames, b.data() + 20, 8);
  CHECK(version == 1);
  CHECK(fr == 2.0);
  CHECK(dim == 1);
  CHECK(frames == 1);

  CHECK(encode({25.0, Matrix(2, 3, 1.5)}).size() == kFaefHeaderBytes + 24);
}

TEST_CASE("FAEF payload is little-endian row-major f32") {
  FeatureMatrix m{2.0, Matrix(2, 2)};
  m.data(0, 0) = 1.0;
  m.data(0, 1) = 2.0;
  m.data(1, 0) = -0.5;
  m.data(1, 1) = 4.0;
  const std::string b = encode(m);
  const float expected[] = {1.0f, 2.0f, -0.5f, 4.0f};
  for (int i = 0; i < 4; ++i) {
    float v;
    std::memcpy(&v, b.data() + kFaefHeaderBytes + 4 * i, 4);
    CHECK(v == expected[i]);
  }
}

TEST_CASE("FAEF writer rejects invalid matrices") {
  FeatureMatrix m{2.0, Matrix(2, 2, 0.0)};
  m.data(1, 1) = std::numeric_limits<double>::quiet_NaN();
  std::ostringstream out;
  CHECK_THROWS_AS(write_features(m, out), ValidationError);
  CHECK(out.str().empty());
  m.data(1, 1) = 1e300;
  CHECK_THROWS_AS(write_features(m, out), ValidationError);
  CHECK(out.str().empty());
  CHECK_THROWS_AS(write_features({0.0, Matrix(1, 1)}, out), ValidationError);
  CHECK_THROWS_AS(write_features({2.0, Matrix()}, out), ValidationError);
}

TEST_CASE("FAEF reader errors name the offset") {
  const std::string good = encode({2.0, Matrix(10, 3, 0.25)});
  SUBCASE("bad magic") {
    std::string b = good;
    b.replace(0, 4, "XXXX");
    CHECK(format_error_offset(b) == 0);
  }
  SUBCASE("bad version") {
    std::string b = good;
    b[4] = 2;
    CHECK(format_error_offset(b) == 4);
  }
  SUBCASE("truncated header") { CHECK_THROWS_AS(decode(good.substr(0, 20)), FormatError); }
  SUBCASE("one row missing") {
    const std::string b = good.substr(0, good.size() - 3 * 4);
    CHECK(format_error_offset(b) == b.size());
  }
  SUBCASE("partial value") {
    const std::string b = good.substr(0, good.size() - 2);
    CHECK(format_error_offset(b) >= kFaefHeaderBytes);
  }
  SUBCASE("trailing bytes") { CHECK_THROWS_AS(decode(good + "x"), FormatError); }
  SUBCASE("zero frame rate") {
    std::string b = good;
    const double zero = 0.0;
    std::memcpy(b.data() + 8, &zero, 8);
    CHECK(format_error_offset(b) == 8);
  }
  SUBCASE("non-finite payload") {
    std::string b = good;
    const float inf = std::numeric_limits<float>::infinity();
    std::memcpy(b.data() + kFaefHeaderBytes + 8, &inf, 4);
    CHECK(format_error_offset(b) == kFaefHeaderBytes + 8);
  }
}

TEST_CASE("FAEF round trip is bit exact") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> rows(1, 50), cols(1, 20);
  const double rates[] = {2.0, 25.0, 75.0, 6.25, 0.1, 31.25};
  for (int trial = 0; trial < 50; ++trial) {
    const FeatureMatrix m = f32_matrix(rng, rows(rng), cols(rng), rates[trial % 6]);
    const FeatureMatrix back = decode(encode(m));
    CHECK(back.frame_rate_hz == m.frame_rate_hz);
    CHECK(back.data == m.data);
  }
}

TEST_CASE("FAEF files and sidecars on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "msaprobe_test_fs";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "a.faef").string();
  std::mt19937_64 rng(5);
  const FeatureMatrix m = f32_matrix(rng, 7, 4, 25.0);
  save_features(m, path);
  CHECK(load_features(path).data == m.data);
  CHECK_THROWS(load_features((dir / "missing.faef").string()));

  CHECK(sidecar_path(path) == path + ".json");
  CHECK_FALSE(load_sidecar(path).has_value());
  save_sidecar({"mert-330m", 14, "song.wav", "fae-dump 0.1"}, path);
  const auto s = load_sidecar(path);
  REQUIRE(s.has_value());
  CHECK(s->model_id == "mert-330m");
  CHECK(s->layer == 14);
  save_sidecar({"passt", std::nullopt, "song.wav", "fae-dump 0.1"}, path);
  CHECK_FALSE(load_sidecar(path)->layer.has_value());
  std::filesystem::remove_all(dir);
}

TEST_CASE("duration check allows two frames of slack") {
  const FeatureMatrix m{25.0, Matrix(750, 2)};
  CHECK_NOTHROW(check_duration(m, 30.0));
  CHECK_NOTHROW(check_duration(m, 30.08));
  CHECK_THROWS_AS(check_duration(m, 30.2), ValidationError);
}

TEST_CASE("synthetic tracks: zero noise rows equal the class mean") {
  SynthConfig cfg;
  cfg.noise_std = 0.0;
  cfg.min_segments = cfg.max_segments = 1;
  cfg.seed = 4;
  const auto [m, ann] = synth_track(cfg);
  const Matrix palette = synth_palette(cfg.dim, cfg.class_count, cfg.palette_seed);
  const auto mean = palette.row(static_cast<std::size_t>(class_id(ann.segments[0].function)));
  for (std::size_t r = 0; r < m.frames(); ++r) {
    for (std::size_t c = 0; c < m.dim(); ++c) CHECK(m.data(r, c) == static_cast<float>(mean[c]));
  }
}

TEST_CASE("synthetic tracks are deterministic and valid") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    SynthConfig cfg;
    cfg.seed = rng();
    cfg.frame_rate_hz = trial % 2 ? 2.0 : 25.0;
    const auto a = synth_track(cfg);
    const auto b = synth_track(cfg);
    CHECK(a.first.data == b.first.data);
    CHECK(a.second == b.second);
    CHECK_NOTHROW(validate(a.first));
    CHECK_NOTHROW(validate(a.second));
    CHECK_NOTHROW(check_duration(a.first, a.second.duration_s));
    CHECK(a.second.segments.size() >= 4);
    CHECK(a.second.segments.size() <= 8);
    for (std::size_t s = 1; s < a.second.segments.size(); ++s) {
      CHECK(a.second.segments[s].function != a.second.segments[s - 1].function);
    }
  }
}

TEST_CASE("synthetic palette has distinct unit-norm class means") {
  const Matrix p = synth_palette(16, 7, 0);
  REQUIRE(p.rows() == 8);
  for (std::size_t r = 0; r < p.rows(); ++r) {
    double n2 = 0.0;
    for (double v : p.row(r)) n2 += v * v;
    CHECK(std::sqrt(n2) == doctest::Approx(1.0).epsilon(1e-6));
    for (std::size_t q = 0; q < r; ++q) CHECK(p.row(q)[0] != p.row(r)[0]);
  }
}

TEST_CASE("segment means of a noisy synthetic track recover the class means") {
  SynthConfig cfg;
  cfg.noise_std = 0.1;
  cfg.dim = 16;
  cfg.seed = 7;
  cfg.frame_rate_hz = 25.0;
  cfg.boundary_marker = 0.0;
  const auto [m, ann] = synth_track(cfg);
  const Matrix palette = synth_palette(cfg.dim, cfg.class_count, cfg.palette_seed);
  const auto seg = to_segmentation(ann);
  for (const Interval& iv : seg.intervals) {
    if (iv.end_s - iv.start_s < 10.0) continue;
    std::vector<double> sum(cfg.dim, 0.0);
    std::size_t n = 0;
    for (std::size_t r = 0; r < m.frames(); ++r) {
      const double center = (static_cast<double>(r) + 0.5) / cfg.frame_rate_hz;
      if (center < iv.start_s || center >= iv.end_s) continue;
      for (std::size_t c = 0; c < cfg.dim; ++c) sum[c] += m.data(r, c);
      ++n;
    }
    const auto mean = palette.row(static_cast<std::size_t>(class_id(iv.function)));
    for (std::size_t c = 0; c < cfg.dim; ++c) CHECK(std::fabs(sum[c] / n - mean[c]) < 0.05);
  }
}

TEST_CASE("synthetic boundary marker lands on the boundary label frame") {
  SynthConfig cfg;
  cfg.noise_std = 0.0;
  cfg.seed = 21;
  const auto [m, ann] = synth_track(cfg);
  const Matrix palette = synth_palette(cfg.dim, cfg.class_count, cfg.palette_seed);
  const FrameTargets t = rasterize(ann);
  for (std::size_t r = 1; r < m.frames() && r < t.frames(); ++r) {
    const auto mean = palette.row(static_cast<std::size_t>(t.function[r]));
    const bool plain = m.data(r, 0) == static_cast<float>(mean[0]) && m.data(r, 1) == static_cast<float>(mean[1]);
    CHECK(plain == (t.boundary[r] == 0));
  }
}

TEST_CASE("synthetic config validation") {
  SynthConfig cfg;
  cfg.noise_std = -1.0;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg = {};
  cfg.max_segments = 2;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg = {};
  cfg.class_count = 8;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
}
