#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace ofo {

/// 12 significant digits, shortest of fixed/scientific ("%.12g"), locale
/// independent. Infinities print as "inf"/"-inf".
std::string format_number(double v);

/// Writes to a sibling temporary file and renames it over `path`.
/// Throws IoError when the file cannot be written.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace ofo
