#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace spde::csv {

/// Shortest round-trip decimal form, '.' separator, independent of the global locale.
[[nodiscard]] std::string format(double value);
[[nodiscard]] double parse_double(std::string_view text);

[[nodiscard]] std::string join(const std::vector<std::string>& fields);
[[nodiscard]] std::vector<std::string> split(std::string_view line);

/// Write `content` verbatim (binary mode, LF stays LF). Throws IoError naming the path.
void write_file(const std::filesystem::path& path, const std::string& content);
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

}  // namespace spde::csv
