#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "winnow/document.hpp"

namespace winnow {

struct DedupStats {
    std::uint64_t input_count = 0;
    std::uint64_t kept_count = 0;
    // Per source: documents seen / dropped as byte-duplicates.
    std::map<std::string, std::uint64_t> per_source_input;
    std::map<std::string, std::uint64_t> per_source_dropped;

    double per_source_dup_rate(const std::string& source) const;
};

// Hash key text: full Unicode lowercase, whitespace runs collapsed to one
// space, leading/trailing whitespace stripped. "Foo  Bar" and "foo bar"
// collide by design.
std::string normalize_for_hash(const std::string& text);

// Keeps the first occurrence of each distinct SHA-256(normalize_for_hash(text)),
// preserving input order. Full 256-bit digests are stored; collisions are not
// a practical concern at any corpus size this tool sees.
std::pair<Corpus, DedupStats> dedup_exact(const Corpus& input, unsigned workers = 0);

} // namespace winnow
