#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace msaprobe {

std::array<std::uint8_t, 32> sha256(std::string_view bytes);
std::string sha256_hex(std::string_view bytes);

/// Independent per-fold seed: the first 8 bytes (little-endian) of
/// SHA-256(le64(seed) || le64(index)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace msaprobe
