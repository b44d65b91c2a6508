#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rankqa {

// UTF-8 helpers. All annotation offsets in this library are Unicode
// scalar-value (codepoint) offsets, not byte offsets. The decoder is
// lenient: a byte that does not start a valid sequence counts as one
// codepoint, so offset arithmetic is total on arbitrary input.

/// Number of codepoints in a UTF-8 string.
std::size_t utf8_length(std::string_view text);

/// Byte offset of the codepoint at `cp_offset`. `cp_offset` may equal
/// utf8_length(text), in which case text.size() is returned.
std::size_t utf8_byte_offset(std::string_view text, std::size_t cp_offset);

/// Substring by codepoint offsets [begin, end).
std::string utf8_substr(std::string_view text, std::size_t begin, std::size_t end);

/// Lowercase ASCII letters in place; other bytes untouched.
std::string ascii_lower(std::string_view text);

/// Index tokenization: lowercase, split on any non-alphanumeric byte.
/// Bytes >= 0x80 are treated as word characters so UTF-8 words survive
/// whole (no case folding outside ASCII).
std::vector<std::string> tokenize(std::string_view text);

/// Whitespace split (used for chunking and token-length counts).
std::vector<std::string> split_whitespace(std::string_view text);

/// QA answer normalization: lowercase, remove ASCII punctuation, split on
/// whitespace, drop the articles "a", "an", "the".
std::vector<std::string> qa_tokens(std::string_view text);

/// Fixed-precision decimal formatting (TREC scores use 6 places).
std::string format_fixed(double value, int places);

/// Shortest string that round-trips the double ("%.17g" trimmed).
std::string format_double(double value);

}  // namespace rankqa
