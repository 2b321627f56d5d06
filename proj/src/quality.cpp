#include "winnow/quality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "winnow/parallel.hpp"
#include "winnow/unicode.hpp"

namespace winnow {

namespace {

// Calls fn(utf8 bytes) for every n-gram window over the text's code points.
template <typename Fn>
void for_each_ngram(const std::string& text, std::size_t n, Fn&& fn) {
    auto cps = uni::decode_utf8(text);
    if (!cps || cps->size() < n) return;
    std::string gram;
    for (std::size_t i = 0; i + n <= cps->size(); ++i) {
        gram.clear();
        for (std::size_t k = 0; k < n; ++k) uni::append_utf8(gram, (*cps)[i + k]);
        fn(gram);
    }
}

} // namespace

SeedNgramSet build_seed(const Corpus& seed_docs, std::size_t min_words, std::size_t ngram_order) {
    SeedNgramSet seed;
    seed.ngram_order = ngram_order;
    std::size_t qualifying = 0;
    for (const Document& doc : seed_docs) {
        if (uni::word_count(doc.text) < min_words) continue;
        ++qualifying;
        for_each_ngram(doc.text, ngram_order, [&](const std::string& gram) {
            seed.grams.insert(gram);
        });
    }
    if (qualifying == 0)
        throw std::runtime_error("build_seed: no seed document has >= " +
                                 std::to_string(min_words) + " words");
    return seed;
}

double coverage(const std::string& text, const SeedNgramSet& seed) {
    std::unordered_set<std::string> distinct;
    std::size_t hits = 0;
    for_each_ngram(text, seed.ngram_order, [&](const std::string& gram) {
        if (distinct.insert(gram).second && seed.grams.count(gram)) ++hits;
    });
    if (distinct.empty()) return 0.0;
    return static_cast<double>(hits) / static_cast<double>(distinct.size());
}

namespace {

std::pair<Corpus, QualityReport> filter_below(const Corpus& input,
                                              const std::vector<double>& scores,
                                              double threshold);

} // namespace

std::pair<Corpus, QualityReport> quality_filter(const Corpus& input, const SeedNgramSet& seed,
                                                double drop_fraction, unsigned workers) {
    if (input.empty()) throw std::runtime_error("quality_filter: empty corpus");
    if (!(drop_fraction >= 0.0 && drop_fraction <= 1.0))
        throw std::runtime_error("quality_filter: drop_fraction outside [0,1]");

    std::vector<double> scores(input.size());
    parallel_chunks(input.size(), resolve_workers(workers), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) scores[i] = coverage(input[i].text, seed);
    });

    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    std::size_t rank = static_cast<std::size_t>(
        std::floor(drop_fraction * static_cast<double>(input.size())));
    if (rank >= input.size()) rank = input.size() - 1;
    return filter_below(input, scores, sorted[rank]);
}

std::pair<Corpus, QualityReport> quality_filter_absolute(const Corpus& input,
                                                         const SeedNgramSet& seed,
                                                         double min_threshold, unsigned workers) {
    if (input.empty()) throw std::runtime_error("quality_filter: empty corpus");
    std::vector<double> scores(input.size());
    parallel_chunks(input.size(), resolve_workers(workers), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) scores[i] = coverage(input[i].text, seed);
    });
    return filter_below(input, scores, min_threshold);
}

namespace {

std::pair<Corpus, QualityReport> filter_below(const Corpus& input,
                                              const std::vector<double>& scores,
                                              double threshold) {
    QualityReport report;
    report.input_count = input.size();
    report.threshold = threshold;
    report.histogram.assign(20, 0);

    Corpus kept;
    kept.reserve(input.size());
    for (std::size_t i = 0; i < input.size(); ++i) {
        report.per_source_input[input[i].source]++;
        std::size_t bin = std::min<std::size_t>(19, static_cast<std::size_t>(scores[i] * 20.0));
        report.histogram[bin]++;
        if (scores[i] < threshold) {
            report.per_source_dropped[input[i].source]++;
            report.dropped_count++;
        } else {
            kept.push_back(input[i]);
        }
    }
    report.kept_count = kept.size();
    return {std::move(kept), std::move(report)};
}

} // namespace

} // namespace winnow
