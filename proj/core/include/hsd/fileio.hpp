#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace hsd {

/// Write `contents` to `path` via a sibling temp file and rename, so readers
/// never observe a partially written artifact.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

/// 16 hex digit FNV-1a checksum of the bytes.
std::string checksum_hex(std::string_view bytes);

std::string format_double(double v);

}  // namespace hsd
