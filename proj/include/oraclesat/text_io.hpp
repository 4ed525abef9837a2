#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace oraclesat {

std::string read_text_file(const std::string &path);

// Writes via a sibling temporary file and rename, so readers never observe a
// partially written file.
void write_text_file_atomic(const std::string &path, std::string_view contents);

// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

// Fixed 17 significant digits.
std::string format_double17(double value);

double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::vector<std::string_view> split_whitespace(std::string_view line);
std::vector<std::string> split_char(std::string_view line, char sep);
std::string_view trim(std::string_view s);

} // namespace oraclesat
