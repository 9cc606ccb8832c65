#include "msaprobe/manifest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "msaprobe/errors.h"

namespace fs = std::filesystem;

namespace msaprobe {

namespace {

std::string resolve(const std::string& base_dir, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute() || base_dir.empty()) return p;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

Manifest parse_manifest(const std::string& json_text, const std::string& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("manifest: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("tracks") || !doc["tracks"].is_array()) {
    throw ValidationError("manifest: expected an object with a 'tracks' array");
  }
  Manifest m;
  std::set<std::string> seen;
  for (const auto& t : doc["tracks"]) {
    ManifestTrack track;
    try {
      track.track_id = t.at("track_id").get<std::string>();
      track.annotation_path = resolve(base_dir, t.at("annotation_path").get<std::string>());
      track.duration_s = t.at("duration_s").get<double>();
      for (const auto& [model, path] : t.at("features").items()) {
        track.features[model] = resolve(base_dir, path.get<std::string>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("manifest: malformed track entry: ") + e.what());
    }
    if (track.track_id.empty()) throw ValidationError("manifest: empty track_id");
    if (!(track.duration_s > 0.0)) throw ValidationError("manifest: track '" + track.track_id + "' has no duration");
    if (!seen.insert(track.track_id).second) throw ValidationError("manifest: duplicate track_id '" + track.track_id + "'");
    m.tracks.push_back(std::move(track));
  }
  return m;
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open manifest: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Manifest m = parse_manifest(ss.str(), fs::path(path).parent_path().string());
  for (const ManifestTrack& t : m.tracks) {
    if (!fs::exists(t.annotation_path)) throw ValidationError("manifest: missing annotation file " + t.annotation_path);
    for (const auto& [model, p] : t.features) {
      if (!fs::exists(p)) throw ValidationError("manifest: missing feature file " + p + " (" + model + ")");
    }
  }
  return m;
}

void save_manifest(const Manifest& m, const std::string& path) {
  nlohmann::json doc;
  doc["tracks"] = nlohmann::json::array();
  for (const ManifestTrack& t : m.tracks) {
    nlohmann::json j;
    j["track_id"] = t.track_id;
    j["annotation_path"] = t.annotation_path;
    j["duration_s"] = t.duration_s;
    j["features"] = t.features;
    doc["tracks"].push_back(std::move(j));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << doc.dump(2) << '\n';
}

}  // namespace msaprobe
