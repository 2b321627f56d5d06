#include <doctest.h>

#include <cmath>
#include <set>

#include "winnow/near_dedup.hpp"
#include "winnow/rng.hpp"

#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace winnow;

namespace {

ShingleSet random_set(SeededRng& rng, std::size_t n) {
    std::set<std::uint64_t> s;
    while (s.size() < n) s.insert(rng.next());
    return ShingleSet(s.begin(), s.end());
}

// Pair of sets with |A∩B| = shared and |A\B| = |B\A| = unique:
// J = shared / (shared + 2*unique).
std::pair<ShingleSet, ShingleSet> set_pair(SeededRng& rng, std::size_t shared,
                                           std::size_t unique) {
    std::set<std::uint64_t> pool;
    while (pool.size() < shared + 2 * unique) pool.insert(rng.next());
    std::vector<std::uint64_t> elems(pool.begin(), pool.end());
    ShingleSet a(elems.begin(), elems.begin() + shared + unique);
    ShingleSet b(elems.begin(), elems.begin() + shared);
    b.insert(b.end(), elems.begin() + shared + unique, elems.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return {a, b};
}

} // namespace

TEST_CASE("shingle definition") {
    ShingleSet abcd = shingle("a b c d");
    CHECK(abcd.size() == 2); // "a b c", "b c d"
    CHECK(shingle("a b").empty());
    CHECK(shingle("").empty());
    CHECK(shingle("x x x x").size() == 1); // set semantics
    ShingleSet again = shingle("a b c d");
    CHECK(abcd == again);
}

TEST_CASE("shingle count bound") {
    auto vocab = synth::target_vocabulary(50, 61);
    SeededRng rng(62);
    for (int i = 0; i < 50; ++i) {
        std::size_t n_words = 1 + rng.next_below(30);
        std::string text = synth::make_doc(vocab, rng, n_words);
        std::size_t max_shingles = n_words < 3 ? 0 : n_words - 2;
        CHECK(shingle(text).size() <= max_shingles);
    }
}

TEST_CASE("jaccard") {
    ShingleSet s = shingle("a b c d e");
    CHECK(jaccard(s, s) == doctest::Approx(1.0));
    CHECK(jaccard(shingle("a b c"), shingle("x y z")) == doctest::Approx(0.0));
    CHECK(jaccard({}, {}) == doctest::Approx(0.0));
    ShingleSet a{1, 2, 3}, b{2, 3, 4}; // inter 2, union 4
    CHECK(jaccard(a, b) == doctest::Approx(0.5));
}

TEST_CASE("s_curve: formula values, endpoints, threshold") {
    // Exact evaluations of 1-(1-s^r)^b.
    CHECK(s_curve(0.80, 16, 4) == doctest::Approx(0.9997820576742885).epsilon(1e-12));
    CHECK(s_curve(0.50, 16, 4) == doctest::Approx(0.6439258695482072).epsilon(1e-12));
    CHECK(s_curve(0.0, 16, 4) == doctest::Approx(0.0));
    CHECK(s_curve(1.0, 16, 4) == doctest::Approx(1.0));
    CHECK(s_curve_threshold(16, 4) == doctest::Approx(0.5).epsilon(1e-12));

    // Monotone non-decreasing in s.
    double prev = 0.0;
    for (double s = 0.0; s <= 1.0; s += 0.01) {
        double p = s_curve(s, 16, 4);
        CHECK(p >= prev - 1e-15);
        prev = p;
    }
}

TEST_CASE("minhash identical sets") {
    SeededRng rng(71);
    ShingleSet s = random_set(rng, 100);
    auto sig_a = minhash(s, 64, 0);
    auto sig_b = minhash(s, 64, 0);
    CHECK(sig_a == sig_b);
    CHECK(minhash_estimate(sig_a, sig_b) == doctest::Approx(1.0));
}

TEST_CASE("minhash empty set is a caller error") {
    CHECK_THROWS_AS(minhash({}, 64, 0), std::invalid_argument);
}

TEST_CASE("minhash estimator calibration at J=0.5") {
    // Empirical std of the estimator across pairs should track
    // sqrt(J(1-J)/k) = 0.0625 for k=64.
    SeededRng rng(72);
    const int pairs = 400;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < pairs; ++i) {
        auto [a, b] = set_pair(rng, 200, 100); // J = 200/400 = 0.5
        double est = minhash_estimate(minhash(a, 64, 0), minhash(b, 64, 0));
        sum += est;
        sum_sq += est * est;
    }
    double mean = sum / pairs;
    double var = sum_sq / pairs - mean * mean;
    double stddev = std::sqrt(var);
    CHECK(mean == doctest::Approx(0.5).epsilon(0.03));
    CHECK(stddev > 0.0625 * 0.75);
    CHECK(stddev < 0.0625 * 1.25);
}

TEST_CASE("minhash estimate near zero for disjoint sets") {
    SeededRng rng(73);
    for (int i = 0; i < 20; ++i) {
        auto [a, b] = set_pair(rng, 0, 300);
        CHECK(minhash_estimate(minhash(a, 64, 1), minhash(b, 64, 1)) <= 0.1);
    }
}

TEST_CASE("lsh candidate basics") {
    SeededRng rng(74);
    ShingleSet s = random_set(rng, 80);
    auto sig = minhash(s, 64, 0);
    auto other = sig;
    for (auto& v : other) v ^= 0xDEADBEEF; // differs in every component

    CHECK(lsh_candidates({sig, sig}, 16, 4) ==
          std::vector<std::pair<std::uint32_t, std::uint32_t>>{{0, 1}});
    CHECK(lsh_candidates({sig, other}, 16, 4).empty());
    CHECK(lsh_candidates({}, 16, 4).empty());
}

TEST_CASE("lsh candidate recall at high similarity") {
    // Planted pairs at J >= 0.9 must be caught essentially always
    // (miss probability (1-0.9^4)^16 ~ 6e-4 per pair at J=0.9; the planted
    // pairs here sit above 0.95 where it is < 1e-11).
    auto vocab = synth::target_vocabulary(800, 81);
    SeededRng rng(82);
    Corpus corpus;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> planted;
    for (int c = 0; c < 100; ++c) {
        std::string base = synth::make_doc(vocab, rng, 80);
        Document a{"a" + std::to_string(c), "s", base, {}};
        Document b{"b" + std::to_string(c), "s",
                   base + " " + vocab[rng.next_below(vocab.size())], {}};
        planted.emplace_back(static_cast<std::uint32_t>(corpus.size()),
                             static_cast<std::uint32_t>(corpus.size() + 1));
        corpus.push_back(a);
        corpus.push_back(b);
    }
    std::vector<MinHashSignature> sigs;
    for (const Document& d : corpus) sigs.push_back(minhash(shingle(d.text), 64, 0));
    auto candidates = lsh_candidates(sigs, 16, 4);
    std::set<std::pair<std::uint32_t, std::uint32_t>> candidate_set(candidates.begin(),
                                                                    candidates.end());
    for (auto p : planted) CHECK(candidate_set.count(p) == 1);
}

TEST_CASE("dedup_near: prefix pair keeps the longest") {
    auto vocab = synth::target_vocabulary(300, 91);
    SeededRng rng(92);
    std::string full = synth::make_doc(vocab, rng, 100);
    // 90-word prefix: J comfortably above 0.8 (88 shared of 98 shingles).
    std::size_t cut = 0;
    std::size_t spaces = 0;
    for (std::size_t i = 0; i < full.size(); ++i) {
        if (full[i] == ' ' && ++spaces == 90) {
            cut = i;
            break;
        }
    }
    std::string prefix = full.substr(0, cut);
    Corpus input{{"prefix", "s", prefix, {}}, {"full", "s", full, {}}};

    auto oracle_j = oracle::jaccard_strings(oracle::shingle_strings(full),
                                            oracle::shingle_strings(prefix));
    CHECK(oracle_j > 0.8);

    NearDedupParams params;
    auto [kept, report] = dedup_near(input, params);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].id == "full");
    CHECK(report.removed_count == 1);
    CHECK(report.cluster_count == 1);
    CHECK(report.docs_covered == 2);
}

TEST_CASE("two identical docs collapse to one") {
    std::string text = "alpha beta gamma delta epsilon zeta eta theta";
    Corpus input{{"a", "s", text, {}}, {"b", "s", text, {}}};
    auto [kept, report] = dedup_near(input, NearDedupParams{});
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].id == "a"); // equal length, lexicographically smaller id
}

TEST_CASE("short docs are singletons") {
    Corpus input{{"a", "s", "one two", {}}, {"b", "s", "one two", {}},
                 {"c", "s", "three four", {}}};
    auto [kept, report] = dedup_near(input, NearDedupParams{});
    CHECK(kept.size() == 3);
    CHECK(report.cluster_count == 0);
}

TEST_CASE("oracle equivalence on planted clusters") {
    // 200 docs with 3 planted clusters; every intra-cluster pair is a
    // base +/- one appended word, so pairwise J >= (n-2)/n >= 0.95.
    auto vocab = synth::target_vocabulary(1500, 101);
    SeededRng rng(102);
    Corpus corpus = synth::make_corpus(vocab, 185, 60, 90, 103, "s", "u");
    int next_id = 0;
    for (int c = 0; c < 3; ++c) {
        std::string base = synth::make_doc(vocab, rng, 70);
        for (int m = 0; m < 5; ++m) {
            std::string text = base;
            for (int extra = 0; extra < m; ++extra) text += " " + vocab[c * 5 + extra];
            corpus.push_back({"clu" + std::to_string(next_id++), "s", text, {}});
        }
    }

    std::vector<std::pair<std::uint32_t, std::uint32_t>> merged;
    auto [kept, report] = dedup_near(corpus, NearDedupParams{}, 0, &merged);

    // Soundness: every merged pair passes exact Jaccard at tau on the
    // string-set oracle too.
    for (auto [i, j] : merged) {
        double j_exact = oracle::jaccard_strings(oracle::shingle_strings(corpus[i].text),
                                                 oracle::shingle_strings(corpus[j].text));
        CHECK(j_exact >= 0.80);
    }

    std::set<std::string> removed_pipeline;
    {
        std::set<std::string> kept_ids;
        for (const Document& d : kept) kept_ids.insert(d.id);
        for (const Document& d : corpus)
            if (!kept_ids.count(d.id)) removed_pipeline.insert(d.id);
    }
    CHECK(removed_pipeline == oracle::near_dup_removed(corpus, 0.80));
}

TEST_CASE("idempotence: second pass at the same tau removes nothing") {
    auto vocab = synth::target_vocabulary(600, 111);
    SeededRng rng(112);
    Corpus corpus = synth::make_corpus(vocab, 80, 60, 80, 113, "s", "q");
    for (int c = 0; c < 10; ++c) {
        std::string base = synth::make_doc(vocab, rng, 60);
        corpus.push_back({"x" + std::to_string(c), "s", base, {}});
        corpus.push_back({"y" + std::to_string(c), "s", base + " tail", {}});
    }
    auto [once, r1] = dedup_near(corpus, NearDedupParams{});
    auto [twice, r2] = dedup_near(once, NearDedupParams{});
    CHECK(r2.removed_count == 0);
    CHECK(once == twice);
}

TEST_CASE("deterministic across worker counts") {
    auto vocab = synth::target_vocabulary(500, 121);
    SeededRng rng(122);
    Corpus corpus = synth::make_corpus(vocab, 150, 50, 70, 123, "s", "w");
    for (int c = 0; c < 20; ++c) {
        std::string base = synth::make_doc(vocab, rng, 55);
        corpus.push_back({"p" + std::to_string(c), "s", base, {}});
        corpus.push_back({"q" + std::to_string(c), "s", base + " more", {}});
    }
    auto [kept1, r1] = dedup_near(corpus, NearDedupParams{}, 1);
    auto [kept4, r4] = dedup_near(corpus, NearDedupParams{}, 4);
    CHECK(kept1 == kept4);
    CHECK(r1.verified_pairs == r4.verified_pairs);
    CHECK(r1.candidate_pairs == r4.candidate_pairs);
}
