#pragma once

#include <map>
#include <string>
#include <vector>

namespace msaprobe {

struct ManifestTrack {
  std::string track_id;
  std::string annotation_path;
  double duration_s = 0.0;
  std::map<std::string, std::string> features;  // model_id -> .faef path
};

/// JSON index of a corpus:
///   {"tracks": [{"track_id", "annotation_path", "duration_s",
///                "features": {model_id: path}}]}
/// Relative paths resolve against the manifest's directory.
struct Manifest {
  std::vector<ManifestTrack> tracks;
};

Manifest parse_manifest(const std::string& json_text, const std::string& base_dir);

/// Parses and checks that ids are unique and that every referenced file
/// exists.
Manifest load_manifest(const std::string& path);

void save_manifest(const Manifest& m, const std::string& path);

}  // namespace msaprobe
