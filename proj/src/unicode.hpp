#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sensboot::unicode {

constexpr char32_t kReplacement = 0xFFFD;

/// Decodes UTF-8; malformed sequences become U+FFFD (one per bad byte).
std::u32string decode_utf8(std::string_view bytes);
void append_utf8(std::string& out, char32_t cp);

bool is_whitespace(char32_t cp);
bool is_punctuation(char32_t cp);
/// Simple one-to-one lowercase mapping for Latin, Greek and Cyrillic.
/// Idempotent: to_lower(to_lower(c)) == to_lower(c).
char32_t to_lower(char32_t cp);

}  // namespace sensboot::unicode
