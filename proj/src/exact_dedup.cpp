#include "winnow/exact_dedup.hpp"

#include <unordered_set>

#include "winnow/parallel.hpp"
#include "winnow/sha256.hpp"
#include "winnow/unicode.hpp"

namespace winnow {

namespace {

struct DigestHash {
    std::size_t operator()(const Sha256Digest& d) const {
        std::size_t h;
        static_assert(sizeof(h) <= sizeof(Sha256Digest));
        __builtin_memcpy(&h, d.data(), sizeof(h));
        return h;
    }
};

} // namespace

double DedupStats::per_source_dup_rate(const std::string& source) const {
    auto in_it = per_source_input.find(source);
    if (in_it == per_source_input.end() || in_it->second == 0) return 0.0;
    auto drop_it = per_source_dropped.find(source);
    std::uint64_t dropped = drop_it == per_source_dropped.end() ? 0 : drop_it->second;
    return static_cast<double>(dropped) / static_cast<double>(in_it->second);
}

std::string normalize_for_hash(const std::string& text) {
    return uni::collapse_whitespace(uni::to_lower_utf8(text));
}

std::pair<Corpus, DedupStats> dedup_exact(const Corpus& input, unsigned workers) {
    // Hashing is parallel; the keep/drop scan is a single sequential reducer
    // over input order so "first occurrence" is worker-count independent.
    std::vector<Sha256Digest> digests(input.size());
    parallel_chunks(input.size(), resolve_workers(workers), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            digests[i] = sha256(normalize_for_hash(input[i].text));
        }
    });

    DedupStats stats;
    stats.input_count = input.size();
    Corpus kept;
    kept.reserve(input.size());
    std::unordered_set<Sha256Digest, DigestHash> seen;
    seen.reserve(input.size() * 2);
    for (std::size_t i = 0; i < input.size(); ++i) {
        stats.per_source_input[input[i].source]++;
        if (seen.insert(digests[i]).second) {
            kept.push_back(input[i]);
        } else {
            stats.per_source_dropped[input[i].source]++;
        }
    }
    stats.kept_count = kept.size();
    return {std::move(kept), std::move(stats)};
}

} // namespace winnow
