#pragma once

// Thin code-point helpers over ICU. Internal to the library.

#include <string>
#include <string_view>

namespace relforge::unicode {

// Invalid UTF-8 sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view text);

bool is_alpha(char32_t c);
bool is_alnum(char32_t c);
bool is_digit(char32_t c);  // general category Nd
bool is_whitespace(char32_t c);  // Unicode White_Space property
bool is_mark(char32_t c);  // Mn, Mc, Me
bool is_control(char32_t c);  // Cc
bool is_default_ignorable(char32_t c);
bool is_emoji(char32_t c);
bool is_fullwidth_form(char32_t c);  // U+FF01..U+FFEE, assigned
bool is_uppercase_or_titlecase(char32_t c);  // Lu or Lt
bool is_assigned_printable(char32_t c);

// Simple (1:1) lowercase mapping.
char32_t simple_lower(char32_t c);

// Decimal value of an Nd code point, -1 otherwise.
int digit_value(char32_t c);

// Root-locale full lowercase mapping.
std::u32string to_lower(std::u32string_view text);
std::u32string nfkc(std::u32string_view text);

}  // namespace relforge::unicode
