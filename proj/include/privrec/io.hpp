#pragma once

#include <string>
#include <string_view>

namespace privrec {

/// Writes to a sibling temporary file and renames it over `path`, so a
/// failed write never leaves a partial file behind.
void write_file_atomically(const std::string& path, std::string_view content);

std::string read_file(const std::string& path);

}  // namespace privrec
