#include <doctest.h>

#include <filesystem>

#include "winnow/rng.hpp"
#include "winnow/tokenizer.hpp"

#include "support/synth.hpp"

using namespace winnow;
namespace fs = std::filesystem;

namespace {

Corpus text_corpus(const std::vector<std::string>& texts) {
    Corpus corpus;
    int i = 0;
    for (const std::string& t : texts) corpus.push_back({"d" + std::to_string(i++), "s", t, {}});
    return corpus;
}

std::string random_bytes(SeededRng& rng, std::size_t max_len) {
    std::size_t len = rng.next_below(max_len + 1);
    std::string out;
    out.reserve(len);
    for (std::size_t i = 0; i < len; ++i)
        out.push_back(static_cast<char>(rng.next_below(256)));
    return out;
}

} // namespace

TEST_CASE("pencil run: 'ab ab ab' with vocab 257 learns one merge") {
    Tokenizer tok = Tokenizer::train(text_corpus({"ab ab ab"}), 257);
    REQUIRE(tok.merges().size() == 1);
    CHECK(tok.merges()[0] == std::pair<Tokenizer::TokenId, Tokenizer::TokenId>{'a', 'b'});
    CHECK(tok.token_bytes(256) == "ab");
    auto ids = tok.encode("ab");
    REQUIRE(ids.size() == 1);
    CHECK(ids[0] == 256);
}

TEST_CASE("pencil run: 'aaab' repeated picks (a,a) first") {
    // Each word has pairs (a,a) x2 and (a,b) x1.
    std::vector<std::string> texts(10, "aaab");
    Tokenizer tok = Tokenizer::train(text_corpus(texts), 258);
    REQUIRE(tok.merges().size() == 2);
    CHECK(tok.merges()[0] == std::pair<Tokenizer::TokenId, Tokenizer::TokenId>{'a', 'a'});
}

TEST_CASE("tie-break is lexicographic on the merged pair") {
    // "cd" and "ab" both occur once; (a,b) sorts before (c,d).
    Tokenizer tok = Tokenizer::train(text_corpus({"ab cd"}), 257);
    REQUIRE(tok.merges().size() == 1);
    CHECK(tok.merges()[0] == std::pair<Tokenizer::TokenId, Tokenizer::TokenId>{'a', 'b'});
}

TEST_CASE("training is deterministic") {
    auto vocab = synth::target_vocabulary(200, 301);
    Corpus corpus = synth::make_corpus(vocab, 100, 20, 60, 302, "s", "t");
    Tokenizer a = Tokenizer::train(corpus, 500);
    Tokenizer b = Tokenizer::train(corpus, 500);
    CHECK(a.merges() == b.merges());
}

TEST_CASE("vocab_size below 257 rejected") {
    CHECK_THROWS(Tokenizer::train(text_corpus({"ab"}), 256));
    CHECK_THROWS(Tokenizer::train({}, 300));
}

TEST_CASE("merges never cross whitespace") {
    Tokenizer tok = Tokenizer::train(text_corpus({"xy xy xy xy"}), 400);
    for (const auto& [l, r] : tok.merges()) {
        std::string merged = tok.token_bytes(l) + tok.token_bytes(r);
        for (char c : merged) CHECK(c != ' ');
    }
}

TEST_CASE("round trip on structured text") {
    auto vocab = synth::target_vocabulary(150, 311);
    Corpus corpus = synth::make_corpus(vocab, 60, 10, 40, 312, "s", "r");
    Tokenizer tok = Tokenizer::train(corpus, 600);
    SeededRng rng(313);
    for (int i = 0; i < 50; ++i) {
        std::string text = synth::make_doc(vocab, rng, 1 + rng.next_below(20));
        CHECK(tok.decode(tok.encode(text)) == text);
    }
    CHECK(tok.decode(tok.encode("")) == "");
    CHECK(tok.decode(tok.encode("  \t\n mixed   spacing \r\n")) == "  \t\n mixed   spacing \r\n");
}

TEST_CASE("property: round trip on random byte strings") {
    auto vocab = synth::target_vocabulary(80, 321);
    Corpus corpus = synth::make_corpus(vocab, 40, 10, 30, 322, "s", "p");
    Tokenizer tok = Tokenizer::train(corpus, 400);
    SeededRng rng(323);
    for (int i = 0; i < 2000; ++i) {
        std::string bytes = random_bytes(rng, 64);
        CHECK(tok.decode(tok.encode(bytes)) == bytes);
    }
}

TEST_CASE("unknown alphabet falls back to byte tokens and round-trips") {
    Tokenizer tok = Tokenizer::train(text_corpus({"plain ascii text only"}), 300);
    std::string emoji = "\xF0\x9F\x98\x80 na\xC3\xAFve";
    CHECK(tok.decode(tok.encode(emoji)) == emoji);
}

TEST_CASE("decode rejects unknown ids") {
    Tokenizer tok = Tokenizer::byte_baseline();
    CHECK_THROWS_AS(tok.decode({999999}), std::out_of_range);
}

TEST_CASE("encode of a full vocab token word has length 1") {
    std::vector<std::string> texts(5, "hello hello hello");
    Tokenizer tok = Tokenizer::train(texts.size() ? text_corpus(texts) : Corpus{}, 300);
    auto ids = tok.encode("hello");
    REQUIRE(ids.size() == 1);
    CHECK(tok.token_bytes(ids[0]) == "hello");
}

TEST_CASE("trained model never tokenizes worse than the byte baseline") {
    auto vocab = synth::target_vocabulary(120, 331);
    Corpus corpus = synth::make_corpus(vocab, 50, 15, 45, 332, "s", "b");
    Tokenizer trained = Tokenizer::train(corpus, 800);
    Tokenizer base = Tokenizer::byte_baseline();
    for (const Document& doc : corpus) {
        CHECK(trained.encode(doc.text).size() <= base.encode(doc.text).size());
    }
}

TEST_CASE("larger vocab never increases token counts on held-out text") {
    auto vocab = synth::target_vocabulary(300, 341);
    Corpus corpus = synth::make_corpus(vocab, 150, 20, 60, 342, "s", "v");
    Tokenizer small = Tokenizer::train(corpus, 400);
    Tokenizer large = Tokenizer::train(corpus, 1200);
    // The first 144 merges of `large` must equal `small`'s merge list.
    for (std::size_t i = 0; i < small.merges().size(); ++i)
        CHECK(small.merges()[i] == large.merges()[i]);

    SeededRng rng(343);
    Corpus held_out = synth::make_corpus(vocab, 40, 20, 60, 344, "s", "h");
    for (const Document& doc : held_out) {
        CHECK(large.encode(doc.text).size() <= small.encode(doc.text).size());
    }
}

TEST_CASE("save/load round trip") {
    auto vocab = synth::target_vocabulary(100, 351);
    Corpus corpus = synth::make_corpus(vocab, 40, 10, 30, 352, "s", "s");
    Tokenizer tok = Tokenizer::train(corpus, 500);
    fs::path path = fs::temp_directory_path() / "winnow_tok_test.json";
    tok.save(path.string());
    Tokenizer loaded = Tokenizer::load(path.string());
    CHECK(loaded.merges() == tok.merges());
    CHECK(loaded.vocab_size() == tok.vocab_size());
    SeededRng rng(353);
    std::string sample = synth::make_doc(vocab, rng, 12);
    CHECK(loaded.encode(sample) == tok.encode(sample));
    fs::remove(path);
}

TEST_CASE("whitespace tokenizer fertility is exactly 1") {
    std::vector<std::string> sentences = {"one two three", "a b", "single"};
    auto counts = whitespace_baseline_counts(sentences);
    auto report = fertility_report(sentences, {counts}, "whitespace");
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].micro_fertility == doctest::Approx(1.0));
    CHECK(report.rows[0].macro_fertility == doctest::Approx(1.0));
}

TEST_CASE("published-count arithmetic reproduces") {
    // 1012 sentences whose word counts sum to 23322; external totals only.
    std::vector<std::string> sentences;
    std::size_t total = 0;
    for (int i = 0; i < 1012; ++i) {
        std::size_t n = i < 1011 ? 23 : 23322 - 23 * 1011;
        std::string s;
        for (std::size_t w = 0; w < n; ++w) s += (w ? " w" : "w");
        total += n;
        sentences.push_back(s);
    }
    REQUIRE(total == 23322);

    TokenCounts big, ours;
    big.name = "cl100k";
    big.total_tokens = 60010;
    ours.name = "bpe16k";
    ours.total_tokens = 35867;
    auto report = fertility_report(sentences, {big, ours}, "cl100k");
    CHECK(report.rows[0].micro_fertility == doctest::Approx(2.573).epsilon(2e-4));
    CHECK(report.rows[1].savings_vs_baseline == doctest::Approx(0.402).epsilon(1e-3));
}

TEST_CASE("micro equals macro when word counts are uniform") {
    std::vector<std::string> sentences = {"a b c d", "e f g h", "i j k l"};
    Tokenizer base = Tokenizer::byte_baseline();
    auto counts = count_tokens(base, "bytes", sentences);
    auto report = fertility_report(sentences, {counts}, "bytes");
    CHECK(report.rows[0].micro_fertility == doctest::Approx(report.rows[0].macro_fertility));
}

TEST_CASE("zero-word sentences are excluded and counted") {
    std::vector<std::string> sentences = {"real words here", "   ", ""};
    auto counts = whitespace_baseline_counts(sentences);
    auto report = fertility_report(sentences, {counts}, "whitespace");
    CHECK(report.skipped_empty == 2);
    CHECK(report.rows[0].micro_fertility == doctest::Approx(1.0));
}

TEST_CASE("fertility of trained model on its own training text <= base") {
    auto vocab = synth::target_vocabulary(100, 361);
    Corpus corpus = synth::make_corpus(vocab, 30, 10, 25, 362, "s", "f");
    Tokenizer trained = Tokenizer::train(corpus, 700);
    std::vector<std::string> sentences;
    for (const Document& d : corpus) sentences.push_back(d.text);
    auto report = fertility_report(
        sentences,
        {count_tokens(trained, "trained", sentences),
         count_tokens(Tokenizer::byte_baseline(), "base", sentences)},
        "base");
    CHECK(report.rows[0].micro_fertility <= report.rows[1].micro_fertility);
    CHECK(report.rows[0].savings_vs_baseline >= 0.0);
}
