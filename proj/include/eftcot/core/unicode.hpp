#pragma once

#include <string>
#include <string_view>

namespace eftcot::text {

/// Decodes UTF-8; malformed sequences become U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t cp);

bool is_space(char32_t cp);
bool is_cjk(char32_t cp);
bool is_alnum(char32_t cp);

/// Simple one-to-one lowercase mapping (Latin, Latin-1, Greek, Cyrillic, full-width Latin).
char32_t fold_case(char32_t cp);

/// Normal form used for quote/evidence matching: whitespace and zero-width
/// characters removed, full-width forms and CJK punctuation mapped to their
/// ASCII counterparts, case folded.
std::u32string normalize_codepoints(std::string_view s);
std::string normalize_for_match(std::string_view s);

/// True when normalize(needle) is a non-empty substring of normalize(haystack).
bool contains_normalized(std::string_view haystack, std::string_view needle);

std::string trim(std::string_view s);
bool is_blank(std::string_view s);

} // namespace eftcot::text
