#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "winnow/document.hpp"

namespace winnow {

struct NormalizeStats {
    std::uint64_t input_count = 0;
    std::uint64_t kept_count = 0;
    std::uint64_t short_dropped = 0;
    std::uint64_t mojibake_fixed = 0;

    // Fixed documents over all processed documents (see module docs: the
    // upstream measurement was quoted over survivors; both agree when no
    // fixed document is short-dropped).
    double mojibake_fixed_rate() const {
        return input_count == 0 ? 0.0
                                : static_cast<double>(mojibake_fixed) /
                                      static_cast<double>(input_count);
    }
};

// Reverses UTF-8 text that was mis-decoded as Latin-1 / Windows-1252.
//
// Every code point must map back to a single byte under the hybrid view
// (cp <= 0xFF verbatim, plus the 27 Windows-1252 specials in 0x80..0x9F);
// the byte string must be strictly valid UTF-8 and contain at least one
// multi-byte sequence. Applied iteratively up to depth 3 for stacked
// mis-decodings. Anything else passes through untouched, so clean text is
// never corrupted. Returns (text, fixed).
std::pair<std::string, bool> repair_mojibake(const std::string& text);

// Transform order: repair_mojibake -> NFC -> collapse_whitespace ->
// collapse_runs; then documents under min_words are dropped. Sets
// meta["ftfy_fixed"]="true" on repaired documents.
std::pair<Corpus, NormalizeStats> phase2_normalize(const Corpus& input,
                                                   std::size_t min_words = 50,
                                                   unsigned workers = 0);

} // namespace winnow
