#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kbfuse::text {

struct Utf8Error : std::runtime_error {
    explicit Utf8Error(std::size_t byte_offset)
        : std::runtime_error("invalid UTF-8 at byte " + std::to_string(byte_offset)),
          offset(byte_offset) {}
    std::size_t offset;
};

/// Decodes a UTF-8 string into Unicode scalar values. Throws Utf8Error on
/// malformed input (overlong forms, surrogates, truncated sequences).
std::vector<char32_t> decode_utf8(std::string_view s);

std::string encode_utf8(const std::vector<char32_t>& cps);

bool is_valid_utf8(std::string_view s);

/// Canonical-composition hook. Validates UTF-8 and returns the text
/// unchanged; inputs are expected in composed form. Single swap point if a
/// full normalizer is ever needed.
std::string nfc(std::string_view s);

/// Number of Unicode scalar values after nfc(). 0 iff s is empty.
std::size_t codepoint_count(std::string_view s);

/// ASCII whitespace trim on both ends.
std::string trim(std::string_view s);

/// ASCII case folding; non-ASCII passes through.
std::string casefold(std::string_view s);

/// trim + casefold + nfc, the entity-name canonical form.
std::string normalize_entity_name(std::string_view s);

/// Consecutive code-point k-grams of nfc(s), each re-encoded as UTF-8.
/// Text shorter than k yields the whole text as a single shingle
/// (empty text yields none).
std::vector<std::string> char_shingles(std::string_view s, int k);

inline std::vector<std::string> char_bigrams(std::string_view s) {
    return char_shingles(s, 2);
}

}  // namespace kbfuse::text
