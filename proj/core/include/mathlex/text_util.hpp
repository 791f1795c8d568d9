#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mathlex::text {

// ASCII case folding; non-ASCII UTF-8 bytes pass through unchanged.
std::string to_lower(std::string_view s);

std::string_view trim(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);

std::vector<std::string> split(std::string_view s, char delim);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Lowercase, trim, and collapse internal whitespace runs to one space.
std::string normalize_phrase(std::string_view s);

bool starts_with_ci(std::string_view s, std::string_view prefix);

// Number of Unicode code points in a UTF-8 string (lead bytes counted).
std::size_t utf8_length(std::string_view s);

}  // namespace mathlex::text
