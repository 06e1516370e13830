#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace clear {

std::string sha256_hex(std::span<const unsigned char> bytes);
std::string sha256_hex(std::string_view text);
/// Throws IoError if the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace clear
