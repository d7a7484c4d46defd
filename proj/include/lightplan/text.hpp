#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lightplan {

/// Shortest decimal text that parses back to exactly `v`.
std::string shortest(double v);

/// `v` with 6 significant digits, as used by the CSV exports.
std::string sig6(double v);

/// Whitespace-separated token with its 1-based column.
struct Token {
  std::string_view text;
  std::size_t column = 0;
};

std::vector<Token> tokenize(std::string_view line);

/// Splits on `sep`, keeping empty fields.
std::vector<std::string_view> split(std::string_view s, char sep);

std::string_view trim(std::string_view s);

/// Strict full-token parse; returns false on trailing junk or non-finite text.
bool parse_double(std::string_view s, double& out);
bool parse_u64(std::string_view s, unsigned long long& out);

/// Whole file as a string; throws IoError naming the path.
std::string read_file(const std::string& path);

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::string& path, std::string_view content);

}  // namespace lightplan
