#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace mmgl {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string base64_encode(std::string_view data);
/// Whole file as bytes; throws ImageUnreadable if it cannot be read.
std::string read_image_bytes(const std::filesystem::path& path);

}  // namespace mmgl
