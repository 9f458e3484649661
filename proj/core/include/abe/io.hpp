#pragma once

#include <filesystem>
#include <span>
#include <string_view>

#include "abe/bytes.hpp"

namespace abe {

// Throws IoError.
Bytes read_file(const std::filesystem::path& path);

// Written beside the target as "<name>.tmp" and renamed into place, so readers
// never see a partial file. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> data);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace abe
