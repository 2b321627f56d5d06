#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "winnow/document.hpp"

namespace winnow {

// Byte-level BPE model. Token ids 0..255 are the raw byte values; id 256+i
// is the i-th learned merge. The byte-level base makes decode(encode(s)) the
// identity on every byte string.
//
// Pre-tokenization splits input into maximal runs of ASCII whitespace bytes
// and non-whitespace words. Merges are learned from (and applied to) words
// only; whitespace runs pass through as single-byte tokens, so merges never
// cross word boundaries and round-tripping is exact.
class Tokenizer {
public:
    using TokenId = std::uint32_t;

    // Greedy BPE: repeatedly merge the most frequent adjacent symbol pair;
    // ties broken by lexicographic byte order of (left, right). Trains until
    // vocab_size is reached or no adjacent pair remains. vocab_size must be
    // at least 257. The seed parameter is accepted for interface symmetry;
    // training is a single deterministic pass and does not consume it.
    static Tokenizer train(const Corpus& corpus, std::size_t vocab_size,
                           std::uint64_t seed = 0);

    std::vector<TokenId> encode(const std::string& text) const;
    std::string decode(const std::vector<TokenId>& ids) const; // throws on unknown id

    std::size_t vocab_size() const { return vocab_.size(); }
    const std::vector<std::pair<TokenId, TokenId>>& merges() const { return merges_; }
    const std::string& token_bytes(TokenId id) const { return vocab_.at(id); }

    // JSON model: {"format","version","vocab_size","merges":[[l,r],...]};
    // ids 0..255 are implicit byte tokens, so the merge list alone
    // reconstructs the vocabulary.
    void save(const std::string& path) const;
    static Tokenizer load(const std::string& path);

    // 256 byte tokens, no merges.
    static Tokenizer byte_baseline();

private:
    Tokenizer();
    void rebuild_merge_index();
    std::vector<TokenId> encode_word(const std::string& word) const;

    std::vector<std::string> vocab_;                       // id -> bytes
    std::vector<std::pair<TokenId, TokenId>> merges_;      // in priority order
    std::vector<std::pair<std::uint64_t, TokenId>> merge_index_; // packed pair -> id, sorted
};

struct FertilityRow {
    std::string name;
    std::uint64_t total_tokens = 0;
    std::uint64_t total_words = 0;
    double macro_fertility = 0.0; // mean of per-sentence tokens/words
    double micro_fertility = 0.0; // total tokens / total words
    bool has_macro = false;       // external totals-only rows cannot report it
    double savings_vs_baseline = 0.0; // 1 - tokens/tokens_baseline
};

struct FertilityReport {
    std::uint64_t sentence_count = 0;
    std::uint64_t skipped_empty = 0; // zero-word sentences, excluded
    std::string baseline;
    std::vector<FertilityRow> rows;
};

// Token counts per sentence for a named tokenizer; external tools can be
// compared by supplying their counts (tokens_per_sentence, or total only).
struct TokenCounts {
    std::string name;
    std::vector<std::uint64_t> tokens_per_sentence; // empty when only a total is known
    std::uint64_t total_tokens = 0;
};

TokenCounts count_tokens(const Tokenizer& tokenizer, const std::string& name,
                         const std::vector<std::string>& sentences);

// One token per whitespace word: fertility exactly 1 by construction.
TokenCounts whitespace_baseline_counts(const std::vector<std::string>& sentences);

// Computes both fertility variants for every row; savings are relative to
// the row named `baseline` (which must be present).
FertilityReport fertility_report(const std::vector<std::string>& sentences,
                                 const std::vector<TokenCounts>& rows,
                                 const std::string& baseline);

} // namespace winnow
