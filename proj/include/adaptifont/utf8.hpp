#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace adaptifont {

/// Decodes a UTF-8 string into code points; throws Error(kMalformedInput) on
/// invalid sequences.
std::u32string decode_utf8(std::string_view text);

std::string encode_utf8(char32_t cp);
std::string encode_utf8(std::u32string_view text);

/// Decodes a string that must hold exactly one code point.
char32_t single_code_point(std::string_view text);

}  // namespace adaptifont
