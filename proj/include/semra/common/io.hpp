#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace semra::io {

// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// Shortest round-trip decimal form; locale independent.
std::string format_double(double v);

}  // namespace semra::io
