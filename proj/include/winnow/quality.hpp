#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "winnow/document.hpp"

namespace winnow {

// Distinct character n-grams of the seed corpus, each stored as the UTF-8
// bytes of its n code points.
struct SeedNgramSet {
    std::size_t ngram_order = 5;
    std::unordered_set<std::string> grams;

    std::size_t size() const { return grams.size(); }
};

struct QualityReport {
    std::uint64_t input_count = 0;
    std::uint64_t kept_count = 0;
    std::uint64_t dropped_count = 0;
    double threshold = 0.0;
    std::map<std::string, std::uint64_t> per_source_input;
    std::map<std::string, std::uint64_t> per_source_dropped;
    std::vector<std::uint64_t> histogram; // 20 equal-width coverage bins over [0,1]
};

// Union of all character n-grams (sliding window over code points, spaces
// included) of seed documents with at least min_words words. No qualifying
// document is an error.
SeedNgramSet build_seed(const Corpus& seed_docs, std::size_t min_words = 200,
                        std::size_t ngram_order = 5);

// Fraction of the document's DISTINCT n-grams present in the seed set;
// documents shorter than n code points score 0.
double coverage(const std::string& text, const SeedNgramSet& seed);

// Drops the bottom drop_fraction of documents by coverage. The threshold is
// the score at sorted rank floor(drop_fraction * N) (0-based); documents
// strictly below it are dropped, ties at the threshold are kept. This
// convention drops exactly drop_fraction*N documents when scores are
// distinct and the product is integral.
std::pair<Corpus, QualityReport> quality_filter(const Corpus& input, const SeedNgramSet& seed,
                                                double drop_fraction = 0.15,
                                                unsigned workers = 0);

// Escape hatch for pristine corpora: an absolute coverage floor instead of
// the unconditional percentile drop.
std::pair<Corpus, QualityReport> quality_filter_absolute(const Corpus& input,
                                                         const SeedNgramSet& seed,
                                                         double min_threshold,
                                                         unsigned workers = 0);

} // namespace winnow
