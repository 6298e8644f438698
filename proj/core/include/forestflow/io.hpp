#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace forestflow {

// Writes `contents` to a sibling temp file, then renames it over `path`.
// On failure no file is left at `path` (or the previous one is untouched).
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace forestflow
