#include <doctest.h>

#include <set>

#include "winnow/quality.hpp"
#include "winnow/rng.hpp"

#include "support/synth.hpp"

using namespace winnow;

namespace {

Corpus one_doc(const std::string& text) { return {{"seed0", "wiki", text, {}}}; }

Document doc(const std::string& id, const std::string& text) { return {id, "s", text, {}}; }

} // namespace

TEST_CASE("build_seed window definition") {
    SeedNgramSet seed = build_seed(one_doc("abcdef"), 1, 5);
    CHECK(seed.size() == 2);
    CHECK(seed.grams.count("abcde") == 1);
    CHECK(seed.grams.count("bcdef") == 1);
}

TEST_CASE("short seed docs contribute nothing") {
    Corpus docs{{"a", "w", "abcd", {}}, {"b", "w", "abcdef", {}}};
    SeedNgramSet seed = build_seed(docs, 1, 5);
    CHECK(seed.size() == 2); // only the six-char doc
}

TEST_CASE("duplicate seed docs do not grow the set") {
    Corpus docs{{"a", "w", "abcdef", {}}, {"b", "w", "abcdef", {}}};
    CHECK(build_seed(docs, 1, 5).size() == 2);
}

TEST_CASE("seed min_words gate and error") {
    Corpus docs{{"a", "w", "only four words here", {}}};
    CHECK_THROWS(build_seed(docs, 200, 5));
}

TEST_CASE("coverage hand cases") {
    SeedNgramSet seed = build_seed(one_doc("abcdef"), 1, 5);
    // "abcdex": distinct 5-grams {abcde, bcdex}; only abcde is seeded.
    CHECK(coverage("abcdex", seed) == doctest::Approx(0.5));
    CHECK(coverage("abcdef", seed) == doctest::Approx(1.0)); // substring of seed
    CHECK(coverage("zzzzzz", seed) == doctest::Approx(0.0)); // disjoint alphabet
    CHECK(coverage("abcd", seed) == doctest::Approx(0.0));   // under 5 code points
}

TEST_CASE("coverage depends only on the distinct 5-gram set") {
    SeedNgramSet seed = build_seed(one_doc("ababab zzz"), 1, 5);
    // "ababab" and "abababab" share the distinct set {ababa, babab}.
    CHECK(coverage("ababab", seed) == coverage("abababab", seed));
    SeedNgramSet partial;
    partial.ngram_order = 5;
    partial.grams.insert("ababa");
    CHECK(coverage("ababab", partial) == doctest::Approx(0.5));
    CHECK(coverage("abababab", partial) == doctest::Approx(0.5));
}

TEST_CASE("monotonicity: larger seed never lowers coverage") {
    auto vocab = synth::target_vocabulary(60, 131);
    SeededRng rng(132);
    Corpus small_seed = synth::make_corpus(vocab, 5, 10, 20, 133, "w", "s");
    Corpus big_seed = small_seed;
    Corpus extra = synth::make_corpus(vocab, 10, 10, 20, 134, "w", "e");
    big_seed.insert(big_seed.end(), extra.begin(), extra.end());

    SeedNgramSet a = build_seed(small_seed, 1, 5);
    SeedNgramSet b = build_seed(big_seed, 1, 5);
    for (int i = 0; i < 50; ++i) {
        std::string text = synth::make_doc(vocab, rng, 15);
        CHECK(coverage(text, b) >= coverage(text, a) - 1e-12);
    }
}

TEST_CASE("quantile rule: 20 distinct scores -> exactly 3 dropped") {
    // Seed covers "aaaaa..." style grams; craft docs with strictly
    // increasing coverage by mixing covered and uncovered alphabets.
    SeedNgramSet seed;
    seed.ngram_order = 5;
    Corpus input;
    // Doc i has i covered grams and (19-i)+1 uncovered ones; coverage is
    // strictly increasing in i.
    for (int i = 0; i < 20; ++i) {
        std::string text;
        for (int g = 0; g < i + 1; ++g) {
            std::string gram = "c" + std::to_string(i) + "x" + std::to_string(g);
            gram.resize(5, 'p');
            seed.grams.insert(gram);
            text += gram;
        }
        for (int g = 0; g < 20 - i; ++g) {
            std::string gram = "u" + std::to_string(i) + "y" + std::to_string(g);
            gram.resize(5, 'q');
            text += gram;
        }
        input.push_back(doc("d" + std::to_string(i), text));
    }
    auto [kept, report] = quality_filter(input, seed, 0.15);
    CHECK(report.dropped_count == 3);
    CHECK(report.kept_count == 17);
    // The three lowest-coverage docs are d0, d1, d2.
    std::set<std::string> kept_ids;
    for (const Document& d : kept) kept_ids.insert(d.id);
    CHECK(!kept_ids.count("d0"));
    CHECK(!kept_ids.count("d1"));
    CHECK(!kept_ids.count("d2"));
}

TEST_CASE("all-identical scores: everything ties at the threshold, kept") {
    SeedNgramSet seed = build_seed(one_doc("abcdefghij"), 1, 5);
    Corpus input;
    for (int i = 0; i < 10; ++i) input.push_back(doc("d" + std::to_string(i), "abcdefghij"));
    auto [kept, report] = quality_filter(input, seed, 0.15);
    CHECK(report.dropped_count == 0);
    CHECK(kept.size() == 10);
}

TEST_CASE("kept fraction 85% on distinct scores at scale") {
    auto vocab = synth::target_vocabulary(2000, 141);
    Corpus seed_docs = synth::make_corpus(vocab, 40, 220, 280, 142, "w", "sd");
    SeedNgramSet seed = build_seed(seed_docs, 200, 5);
    Corpus input = synth::make_corpus(vocab, 2000, 55, 100, 143, "s", "in");
    auto [kept, report] = quality_filter(input, seed, 0.15);
    // floor(0.15*2000) = 300 dropped when scores are distinct; ties can only
    // reduce drops, and at this scale they are essentially absent.
    CHECK(report.kept_count >= 1700);
    CHECK(report.kept_count <= 1701);
    CHECK(report.threshold > 0.0);
    CHECK(report.threshold < 1.0);
}

TEST_CASE("threshold equals the rank-floor(f*N) order statistic") {
    auto vocab = synth::target_vocabulary(500, 151);
    Corpus seed_docs = synth::make_corpus(vocab, 20, 210, 260, 152, "w", "sd");
    SeedNgramSet seed = build_seed(seed_docs, 200, 5);
    Corpus input = synth::make_corpus(vocab, 403, 55, 90, 153, "s", "in");

    std::vector<double> scores;
    for (const Document& d : input) scores.push_back(coverage(d.text, seed));
    std::sort(scores.begin(), scores.end());
    std::size_t rank = static_cast<std::size_t>(0.15 * 403); // floor
    auto [kept, report] = quality_filter(input, seed, 0.15);
    CHECK(report.threshold == scores[rank]);
}

TEST_CASE("absolute threshold mode skips the percentile drop") {
    SeedNgramSet seed = build_seed(one_doc("abcdefghijklmno"), 1, 5);
    Corpus pristine;
    for (int i = 0; i < 8; ++i) pristine.push_back(doc("p" + std::to_string(i), "abcdefghij"));
    // Percentile mode always drops on distinct scores; absolute mode keeps
    // everything at or above the floor.
    auto [kept, report] = quality_filter_absolute(pristine, seed, 0.5);
    CHECK(report.dropped_count == 0);
    CHECK(report.threshold == doctest::Approx(0.5));

    pristine.push_back(doc("junk", "qqqqqzzzzz"));
    auto [kept2, report2] = quality_filter_absolute(pristine, seed, 0.5);
    CHECK(report2.dropped_count == 1);
    CHECK(kept2.size() == 8);
}

TEST_CASE("per-source drops recorded") {
    SeedNgramSet seed = build_seed(one_doc("abcdefghijklmno"), 1, 5);
    Corpus input;
    for (int i = 0; i < 5; ++i) {
        Document good = doc("g" + std::to_string(i), "abcdefghijklmno");
        good.source = "clean";
        input.push_back(good);
        Document bad = doc("b" + std::to_string(i), "zz" + std::to_string(i) + "qqqppp");
        bad.source = "dirty";
        input.push_back(bad);
    }
    auto [kept, report] = quality_filter(input, seed, 0.5);
    CHECK(report.per_source_dropped.count("dirty") == 1);
    CHECK(report.per_source_dropped.count("clean") == 0);
}
