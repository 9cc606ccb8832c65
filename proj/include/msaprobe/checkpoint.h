#pragma once

// Checkpoint file: one line of JSON header terminated by '\n', then a u64
// parameter count and that many little-endian f64 values (weight row-major,
// then bias).

#include <string>

#include "msaprobe/probe.h"

namespace msaprobe {

struct Checkpoint {
  ProbeModel model;
  std::string config_hash;
};

void save_checkpoint(const ProbeModel& model, const TrainConfig& cfg, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace msaprobe
