#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kbfuse/rng.hpp"
#include "kbfuse/text.hpp"

using namespace kbfuse;

TEST_CASE("codepoint counting") {
    CHECK(text::codepoint_count("") == 0);
    CHECK(text::codepoint_count("abc") == 3);
    CHECK(text::codepoint_count("藏药红景天") == 5);
    // mixed CJK/ASCII literal: 3 CJK + comma + space + 4 + space + 2 = 12
    CHECK(text::codepoint_count("红景天, dose 5g") == 12);
}

TEST_CASE("invalid UTF-8 is rejected") {
    CHECK_THROWS_AS(text::codepoint_count("\xFF\xFE"), text::Utf8Error);
    CHECK_THROWS_AS(text::codepoint_count("\xC0\xAF"), text::Utf8Error);  // overlong
    CHECK_THROWS_AS(text::codepoint_count("\xED\xA0\x80"), text::Utf8Error);  // surrogate
    CHECK(text::is_valid_utf8("ok"));
    CHECK_FALSE(text::is_valid_utf8("tail\xE4\xB8"));
}

TEST_CASE("decode/encode round trip") {
    Rng rng(7);
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<char32_t> cps;
        const int n = rng.uniform_int(0, 40);
        for (int i = 0; i < n; ++i) {
            char32_t cp;
            do {
                cp = static_cast<char32_t>(rng.uniform(0x10FFFF + 1));
            } while (cp >= 0xD800 && cp <= 0xDFFF);
            cps.push_back(cp);
        }
        const auto enc = text::encode_utf8(cps);
        CHECK(text::decode_utf8(enc) == cps);
        CHECK(text::codepoint_count(enc) == cps.size());
    }
}

TEST_CASE("codepoint count is additive over concatenation") {
    Rng rng(11);
    for (int iter = 0; iter < 50; ++iter) {
        auto rand_str = [&rng]() {
            std::vector<char32_t> cps;
            const int n = rng.uniform_int(0, 12);
            for (int i = 0; i < n; ++i)
                cps.push_back(static_cast<char32_t>(0x4E00 + rng.uniform(1000)));
            return text::encode_utf8(cps);
        };
        const auto a = rand_str();
        const auto b = rand_str();
        CHECK(text::codepoint_count(a + b) == text::codepoint_count(a) + text::codepoint_count(b));
    }
}

TEST_CASE("entity name normalization") {
    CHECK(text::normalize_entity_name("  RedGinseng ") == "redginseng");
    CHECK(text::normalize_entity_name("红景天") == "红景天");
    CHECK(text::normalize_entity_name(" \t红景天\n") == "红景天");
}

TEST_CASE("shingles and bigrams") {
    CHECK(text::char_bigrams("abc") == std::vector<std::string>{"ab", "bc"});
    CHECK(text::char_bigrams("").empty());
    CHECK(text::char_bigrams("a") == std::vector<std::string>{"a"});  // shorter than k: whole text
    CHECK(text::char_shingles("红景天", 2) == std::vector<std::string>{"红景", "景天"});
    CHECK(text::char_shingles("abcde", 5) == std::vector<std::string>{"abcde"});
    CHECK(text::char_shingles("abcdef", 5) == std::vector<std::string>{"abcde", "bcdef"});
}
