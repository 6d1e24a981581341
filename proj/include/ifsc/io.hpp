#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ifsc {

std::string trim(std::string_view s);

// Whole-file helpers; both throw DataError on IO failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

// Splits on '\n' (a trailing newline does not produce an empty last line).
std::vector<std::string> split_lines(std::string_view text);

}  // namespace ifsc
