#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "winnow/unicode.hpp"

using namespace winnow;

#ifndef WINNOW_TEST_DATA_DIR
#define WINNOW_TEST_DATA_DIR "tests/data"
#endif

TEST_CASE("utf8 decode rejects malformed input") {
    std::size_t at = 0;
    CHECK(!uni::is_valid_utf8("\xC0\xAF", &at)); // overlong '/'
    CHECK(at == 0);
    CHECK(!uni::is_valid_utf8("\xED\xA0\x80"));  // surrogate
    CHECK(!uni::is_valid_utf8("\xF4\x90\x80\x80")); // > U+10FFFF
    CHECK(!uni::is_valid_utf8("abc\x80"));
    CHECK(!uni::is_valid_utf8("\xC3"));          // truncated
    CHECK(uni::is_valid_utf8(""));
    CHECK(uni::is_valid_utf8("caf\xC3\xA9"));
    CHECK(uni::is_valid_utf8("\xF0\x9F\x98\x80")); // emoji
}

TEST_CASE("utf8 round trip") {
    std::u32string cps = {U'a', 0xE9, 0x4E2D, 0x1F600};
    std::string bytes = uni::encode_utf8(cps);
    auto back = uni::decode_utf8(bytes);
    REQUIRE(back.has_value());
    CHECK(*back == cps);
}

TEST_CASE("error offset points at the bad byte") {
    std::size_t at = 99;
    CHECK(!uni::is_valid_utf8("ab\xFFzz", &at));
    CHECK(at == 2);
}

TEST_CASE("lowercase") {
    CHECK(uni::to_lower_utf8("Soomaali BAA") == "soomaali baa");
    CHECK(uni::to_lower_utf8("ÀÉÎ") == "àéî");
    CHECK(uni::to_lower_utf8("ΣΟΦΙΑ") == "σοφια");
    // U+0130 is the sole one-to-many lowercase mapping.
    CHECK(uni::to_lower_utf8("İ") == "i̇");
    CHECK(uni::to_lower_utf8("already lower 123") == "already lower 123");
}

TEST_CASE("whitespace collapse") {
    CHECK(uni::collapse_whitespace("a\n\t b") == "a b");
    CHECK(uni::collapse_whitespace("  x  ") == "x");
    CHECK(uni::collapse_whitespace("") == "");
    CHECK(uni::collapse_whitespace("a b c") == "a b c"); // nbsp, em-space
}

TEST_CASE("run collapse") {
    CHECK(uni::collapse_runs("aaaaa") == "aaa");
    CHECK(uni::collapse_runs("aaa") == "aaa");
    CHECK(uni::collapse_runs("aabbbbcc") == "aabbbcc");
    CHECK(uni::collapse_runs("") == "");
    CHECK(uni::collapse_runs("ééééé") == "ééé");
}

TEST_CASE("word count") {
    CHECK(uni::word_count("a b c") == 3);
    CHECK(uni::word_count("") == 0);
    CHECK(uni::word_count("  x  ") == 1);
    CHECK(uni::word_count("one\ttwo\nthree") == 3);
}

TEST_CASE("word_count invariant under collapse_whitespace") {
    for (const char* s : {"a  b   c", " x ", "", "a b", "tab\there"}) {
        CHECK(uni::word_count(uni::collapse_whitespace(s)) == uni::word_count(s));
    }
}

TEST_CASE("nfc basics") {
    CHECK(uni::nfc_utf8("é") == "é");
    CHECK(uni::nfc_utf8("é") == "é");
    CHECK(uni::nfc_utf8("abc") == "abc");
    CHECK(uni::nfc_utf8("Å") == "Å");      // angstrom -> A-ring
    CHECK(uni::nfc_utf8("가") == "가"); // Hangul L+V
}

TEST_CASE("nfc matches reference vectors") {
    std::ifstream in(std::string(WINNOW_TEST_DATA_DIR) + "/nfc_cases.jsonl");
    REQUIRE(in.good());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        auto row = nlohmann::json::parse(line);
        std::string input = row["in"].get<std::string>();
        std::string expected = row["nfc"].get<std::string>();
        CHECK_MESSAGE(uni::nfc_utf8(input) == expected, "case ", n);
        ++n;
    }
    CHECK(n >= 500);
}

TEST_CASE("nfc idempotent on the vector corpus") {
    std::ifstream in(std::string(WINNOW_TEST_DATA_DIR) + "/nfc_cases.jsonl");
    REQUIRE(in.good());
    std::string line;
    while (std::getline(in, line)) {
        auto row = nlohmann::json::parse(line);
        std::string once = uni::nfc_utf8(row["in"].get<std::string>());
        CHECK(uni::nfc_utf8(once) == once);
    }
}

TEST_CASE("split_words returns views over the input") {
    auto words = uni::split_words("foo  bar baz");
    REQUIRE(words.size() == 3);
    CHECK(words[0] == "foo");
    CHECK(words[1] == "bar");
    CHECK(words[2] == "baz");
    CHECK(uni::split_words("").empty());
    CHECK(uni::split_words(" \t ").empty());
}
