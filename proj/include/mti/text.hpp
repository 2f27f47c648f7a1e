#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mti::text {

/// One decoded scalar value together with the byte range it occupies.
/// Ill-formed UTF-8 sequences decode to U+FFFD covering the offending bytes.
struct Scalar {
  char32_t value;
  std::size_t byte_begin;
  std::size_t byte_end;
};

std::vector<Scalar> decode(std::string_view utf8);
std::string encode(char32_t cp);
std::size_t scalar_length(std::string_view utf8);

/// Substring addressed by scalar offsets [begin, end). Offsets past the end clamp.
std::string scalar_substr(std::string_view utf8, std::size_t begin, std::size_t end);

/// Case- and diacritic-insensitive key: NFD, strip nonspacing marks, full case
/// fold, expand oe/ae ligatures, normalize typographic apostrophes.
std::string fold(std::string_view utf8);

bool is_letter(char32_t cp);
bool is_digit(char32_t cp);
bool is_upper(char32_t cp);
bool is_lower(char32_t cp);
bool is_space(char32_t cp);
bool is_apostrophe(char32_t cp);
bool is_hyphen(char32_t cp);
bool is_mark(char32_t cp);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
bool starts_with_ci(std::string_view s, std::string_view prefix);

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double v);
/// Strict parse of a full string; throws Error(MalformedInput) on junk.
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

}  // namespace mti::text
