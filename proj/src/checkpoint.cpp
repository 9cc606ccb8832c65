#include "msaprobe/checkpoint.h"

#include <bit>
#include <fstream>

#include <json.hpp>

#include "msaprobe/errors.h"
#include "msaprobe/experiment.h"

namespace msaprobe {

void save_checkpoint(const ProbeModel& model, const TrainConfig& cfg, const std::string& path) {
  nlohmann::json header;
  header["format"] = "msa-probe-checkpoint";
  header["version"] = 1;
  header["feature_dim"] = model.feature_dim();
  header["class_order"] = std::vector<std::string>(kClassNames.begin(), kClassNames.end());
  header["config_hash"] = config_hash(cfg);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << header.dump() << '\n';

  std::vector<double> params(model.weight.values().begin(), model.weight.values().end());
  params.insert(params.end(), model.bias.begin(), model.bias.end());
  auto put = [&](std::uint64_t bits) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
    out.write(buf, 8);
  };
  put(params.size());
  for (double p : params) put(std::bit_cast<std::uint64_t>(p));
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint: " + path);
  std::string line;
  if (!std::getline(in, line)) throw FormatError(0, path + ": missing checkpoint header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(0, path + ": bad checkpoint header: " + e.what());
  }
  if (header.value("format", "") != "msa-probe-checkpoint" || header.value("version", 0) != 1) {
    throw FormatError(0, path + ": not a version 1 checkpoint");
  }
  const std::vector<std::string> order = header.value("class_order", std::vector<std::string>{});
  if (!std::equal(order.begin(), order.end(), kClassNames.begin(), kClassNames.end())) {
    throw FormatError(0, path + ": unexpected class order");
  }
  const auto dim = header.value("feature_dim", std::size_t{0});
  if (dim == 0) throw FormatError(0, path + ": feature_dim missing");

  std::uint64_t offset = line.size() + 1;
  auto get = [&]() {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    if (in.gcount() != 8) throw FormatError(offset + static_cast<std::uint64_t>(in.gcount()), path + ": truncated parameters");
    offset += 8;
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return bits;
  };
  const std::uint64_t count = get();
  if (count != dim * kProbeOutputs + kProbeOutputs) throw FormatError(offset - 8, path + ": parameter count mismatch");

  Checkpoint ck;
  ck.config_hash = header.value("config_hash", "");
  ck.model = zero_model(dim);
  for (double& w : ck.model.weight.values()) w = std::bit_cast<double>(get());
  for (double& b : ck.model.bias) b = std::bit_cast<double>(get());
  return ck;
}

}  // namespace msaprobe
