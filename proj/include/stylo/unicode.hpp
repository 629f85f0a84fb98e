#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace stylo::unicode {

/// Unicode NFC normalisation of UTF-8 text; invalid sequences become U+FFFD.
std::string nfc(std::string_view utf8);

/// CRLF and lone CR become LF.
std::string normalize_newlines(std::string_view text);

/// Decodes UTF-8 into code points (U+FFFD for invalid bytes).
std::u32string decode(std::string_view utf8);
void append_utf8(std::string& out, char32_t cp);
std::string encode(std::u32string_view cps);

bool is_space(char32_t cp);
bool is_letter(char32_t cp);
bool is_digit(char32_t cp);
bool is_upper(char32_t cp);
/// General category P*.
bool is_punct(char32_t cp);
/// Simple (one-to-one) lowercase mapping.
char32_t to_lower(char32_t cp);
std::string to_lower(std::string_view utf8);

/// Number of whitespace-delimited words.
std::size_t count_words(std::string_view utf8);
/// The whitespace-delimited words themselves.
std::vector<std::string_view> split_whitespace(std::string_view utf8);

}  // namespace stylo::unicode
