#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

namespace astres::util {

std::string to_lower(std::string_view s);

/// Whole-file helpers; failures throw IoError naming the path.
std::string read_file(const std::filesystem::path &path);
void write_file(const std::filesystem::path &path, std::string_view content);
nlohmann::json read_json(const std::filesystem::path &path);

/// Hex-encoded SHA-256 digest.
std::string sha256_hex(std::string_view data);

} // namespace astres::util
