#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "hsd/training.hpp"

namespace hsd {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Self-describing archive:
///   8-byte magic "HSDCKPT\0", u32 version, u64 header length (little endian),
///   JSON header (configs, vocabularies, history, parameter names and shapes),
///   then every parameter as row-major little-endian float64 in header order.
std::string serialize_checkpoint(const TrainedModel& trained);
TrainedModel deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const TrainedModel& trained);
TrainedModel load_checkpoint(const std::filesystem::path& path);

}  // namespace hsd
