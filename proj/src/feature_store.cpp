#include "msaprobe/feature_store.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "msaprobe/errors.h"

namespace msaprobe {

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U bits = std::bit_cast<U>(value);
  char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(buf, sizeof(U));
}

template <typename T>
T get_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(p[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

// Reads up to n bytes; returns how many arrived.
std::size_t read_some(std::istream& in, unsigned char* dst, std::size_t n) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount());
}

}  // namespace

void validate(const FeatureMatrix& m) {
  if (!(std::isfinite(m.frame_rate_hz) && m.frame_rate_hz > 0.0)) {
    throw ValidationError("feature frame rate must be positive and finite");
  }
  if (m.frames() < 1 || m.dim() < 1) throw ValidationError("feature matrix must have at least one frame and one dim");
  for (double v : m.data.values()) {
    if (!std::isfinite(v)) throw ValidationError("feature matrix contains non-finite values");
  }
}

void check_duration(const FeatureMatrix& m, double duration_s) {
  const double expected = duration_s * m.frame_rate_hz;
  if (std::abs(static_cast<double>(m.frames()) - expected) > 2.0) {
    std::ostringstream msg;
    msg << "feature frame count " << m.frames() << " does not match duration " << duration_s << " s at "
        << m.frame_rate_hz << " Hz (expected ~" << expected << ")";
    throw ValidationError(msg.str());
  }
}

std::uint64_t write_features(const FeatureMatrix& m, std::ostream& sink) {
  validate(m);
  if (m.dim() > UINT32_MAX) throw ValidationError("feature dim does not fit in u32");
  for (double v : m.data.values()) {
    if (std::abs(v) > std::numeric_limits<float>::max()) throw ValidationError("feature value overflows f32");
  }
  sink.write("FAEF", 4);
  put_le<std::uint32_t>(sink, kFaefVersion);
  put_le<double>(sink, m.frame_rate_hz);
  put_le<std::uint32_t>(sink, static_cast<std::uint32_t>(m.dim()));
  put_le<std::uint64_t>(sink, m.frames());
  for (double v : m.data.values()) put_le<float>(sink, static_cast<float>(v));
  if (!sink) throw std::runtime_error("failed writing feature data");
  return kFaefHeaderBytes + 4ull * m.frames() * m.dim();
}

FeatureMatrix read_features(std::istream& source) {
  unsigned char header[kFaefHeaderBytes];
  const std::size_t got = read_some(source, header, kFaefHeaderBytes);
  if (got < 4 || std::memcmp(header, "FAEF", 4) != 0) {
    if (got >= 4) throw FormatError(0, "bad magic");
    throw FormatError(got, "truncated header");
  }
  if (got < kFaefHeaderBytes) throw FormatError(got, "truncated header");

  const auto version = get_le<std::uint32_t>(header + 4);
  if (version != kFaefVersion) throw FormatError(4, "unsupported version " + std::to_string(version));
  const auto frame_rate = get_le<double>(header + 8);
  if (!(std::isfinite(frame_rate) && frame_rate > 0.0)) throw FormatError(8, "invalid frame rate");
  const auto dim = get_le<std::uint32_t>(header + 16);
  if (dim == 0) throw FormatError(16, "dim must be >= 1");
  const auto frames = get_le<std::uint64_t>(header + 20);
  if (frames == 0) throw FormatError(20, "frames must be >= 1");
  if (frames > (std::uint64_t{1} << 40) / dim) throw FormatError(20, "implausible frame count");

  FeatureMatrix m;
  m.frame_rate_hz = frame_rate;
  m.data = Matrix(frames, dim);

  const std::size_t row_bytes = 4ull * dim;
  std::vector<unsigned char> row(row_bytes);
  for (std::uint64_t r = 0; r < frames; ++r) {
    const std::uint64_t offset = kFaefHeaderBytes + r * row_bytes;
    const std::size_t n = read_some(source, row.data(), row_bytes);
    if (n < row_bytes) {
      throw FormatError(offset + n, "truncated payload: header declares " + std::to_string(frames) +
                                        " frames, data ends in frame " + std::to_string(r));
    }
    auto out = m.data.row(r);
    for (std::uint32_t c = 0; c < dim; ++c) {
      const float v = get_le<float>(row.data() + 4 * c);
      if (!std::isfinite(v)) throw FormatError(offset + 4 * c, "non-finite value");
      out[c] = v;
    }
  }
  if (source.peek() != std::char_traits<char>::eof()) {
    throw FormatError(kFaefHeaderBytes + frames * row_bytes, "trailing bytes after payload");
  }
  return m;
}

void save_features(const FeatureMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_features(m, out);
}

FeatureMatrix load_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open feature file: " + path);
  try {
    return read_features(in);
  } catch (const FormatError& e) {
    throw FormatError(e.offset(), path + ": " + e.what());
  }
}

std::string sidecar_path(const std::string& faef_path) { return faef_path + ".json"; }

void save_sidecar(const FeatureSidecar& s, const std::string& faef_path) {
  nlohmann::json j;
  j["model_id"] = s.model_id;
  j["layer"] = s.layer ? nlohmann::json(*s.layer) : nlohmann::json(nullptr);
  j["source_audio"] = s.source_audio;
  j["extraction_tool_version"] = s.extraction_tool_version;
  std::ofstream out(sidecar_path(faef_path));
  if (!out) throw std::runtime_error("cannot open for writing: " + sidecar_path(faef_path));
  out << j.dump(2) << '\n';
}

std::optional<FeatureSidecar> load_sidecar(const std::string& faef_path) {
  const std::string path = sidecar_path(faef_path);
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::ifstream in(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  FeatureSidecar s;
  s.model_id = j.value("model_id", "");
  if (j.contains("layer") && j["layer"].is_number_integer()) s.layer = j["layer"].get<int>();
  s.source_audio = j.value("source_audio", "");
  s.extraction_tool_version = j.value("extraction_tool_version", "");
  return s;
}

}  // namespace msaprobe
