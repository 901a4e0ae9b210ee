#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace chainforge::text {

/// Decodes UTF-8; invalid bytes decode to U+FFFD one byte at a time.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

/// Simple case folding for ASCII, Latin-1, Greek and Cyrillic.
char32_t fold_case(char32_t c) noexcept;
std::u32string fold_case(std::u32string_view s);

bool is_space(char32_t c) noexcept;

/// Collapses every whitespace run into one ASCII space and trims both ends.
std::u32string collapse_whitespace(std::u32string_view s);
std::string collapse_whitespace(std::string_view s);

/// Truncates to at most `max_chars` code points.
std::string truncate_chars(std::string_view s, std::size_t max_chars);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;
std::string hex64(std::uint64_t v);

std::string to_lower_ascii(std::string_view s);

}  // namespace chainforge::text
