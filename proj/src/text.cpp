#include "kbfuse/text.hpp"

#include <algorithm>
#include <cctype>

namespace kbfuse::text {

namespace {

// Decodes one scalar value starting at s[i]; advances i past it.
// Returns false on malformed input.
bool decode_one(std::string_view s, std::size_t& i, char32_t& out) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        out = b0;
        i += 1;
        return true;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return false;
    }
    if (i + len > s.size()) return false;
    for (int k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) return false;
        cp = (cp << 6) | (b & 0x3F);
    }
    // overlong forms, surrogates, out of range
    static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len]) return false;
    if (cp >= 0xD800 && cp <= 0xDFFF) return false;
    if (cp > 0x10FFFF) return false;
    out = cp;
    i += len;
    return true;
}

}  // namespace

std::vector<char32_t> decode_utf8(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        char32_t cp = 0;
        const std::size_t at = i;
        if (!decode_one(s, i, cp)) throw Utf8Error(at);
        out.push_back(cp);
    }
    return out;
}

std::string encode_utf8(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size() * 3);
    for (char32_t cp : cps) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

bool is_valid_utf8(std::string_view s) {
    std::size_t i = 0;
    char32_t cp = 0;
    while (i < s.size()) {
        if (!decode_one(s, i, cp)) return false;
    }
    return true;
}

std::string nfc(std::string_view s) {
    std::size_t i = 0;
    char32_t cp = 0;
    while (i < s.size()) {
        const std::size_t at = i;
        if (!decode_one(s, i, cp)) throw Utf8Error(at);
    }
    return std::string(s);
}

std::size_t codepoint_count(std::string_view s) {
    std::size_t i = 0, n = 0;
    char32_t cp = 0;
    while (i < s.size()) {
        const std::size_t at = i;
        if (!decode_one(s, i, cp)) throw Utf8Error(at);
        ++n;
    }
    return n;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string casefold(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

std::string normalize_entity_name(std::string_view s) {
    return nfc(casefold(trim(s)));
}

std::vector<std::string> char_shingles(std::string_view s, int k) {
    const auto cps = decode_utf8(nfc(s));
    std::vector<std::string> out;
    if (cps.empty() || k <= 0) return out;
    if (cps.size() < static_cast<std::size_t>(k)) {
        out.push_back(encode_utf8(cps));
        return out;
    }
    out.reserve(cps.size() - k + 1);
    for (std::size_t i = 0; i + k <= cps.size(); ++i) {
        out.push_back(encode_utf8({cps.begin() + i, cps.begin() + i + k}));
    }
    return out;
}

}  // namespace kbfuse::text
