#pragma once

#include <filesystem>
#include <string>

namespace clband {

// Writes `contents` to a sibling temporary file and renames it over `path`,
// so readers never observe a partial file.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace clband
