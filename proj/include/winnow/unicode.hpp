#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace winnow::uni {

// Strict UTF-8 decode: rejects overlong forms, surrogates, cp > U+10FFFF and
// truncated sequences. On failure returns the byte offset of the first bad
// byte in *error_offset (when non-null) and std::nullopt.
std::optional<std::u32string> decode_utf8(std::string_view bytes,
                                          std::size_t* error_offset = nullptr);

std::string encode_utf8(const std::u32string& cps);
void append_utf8(std::string& out, char32_t cp);

bool is_valid_utf8(std::string_view bytes, std::size_t* error_offset = nullptr);

// Unicode White_Space property.
bool is_whitespace(char32_t cp);

// Full Unicode lowercasing, no locale tailoring. The only one-to-many
// mapping is U+0130 (LATIN CAPITAL LETTER I WITH DOT ABOVE) -> "i" U+0307.
std::u32string to_lower(const std::u32string& cps);
std::string to_lower_utf8(std::string_view utf8);

// Canonical composition (Unicode NFC).
std::u32string nfc(const std::u32string& cps);
std::string nfc_utf8(std::string_view utf8);

// Number of maximal non-whitespace runs.
std::size_t word_count(std::string_view utf8);

// Number of code points (input must be valid UTF-8).
std::size_t codepoint_count(std::string_view utf8);

// Every maximal whitespace run -> one U+0020, leading/trailing stripped.
std::string collapse_whitespace(std::string_view utf8);

// Runs of more than three identical code points truncated to three.
std::string collapse_runs(std::string_view utf8);

// Splits on Unicode whitespace; returns views into the input.
std::vector<std::string_view> split_words(std::string_view utf8);

} // namespace winnow::uni
