#include "winnow/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "winnow/unicode.hpp"

namespace winnow {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kByteVocab = 256;

bool is_ascii_space(unsigned char b) {
    return b == ' ' || b == '\t' || b == '\n' || b == '\r' || b == '\f' || b == '\v';
}

std::uint64_t pack_pair(std::uint32_t l, std::uint32_t r) {
    return (static_cast<std::uint64_t>(l) << 32) | r;
}

// Maximal runs of non-whitespace bytes ("words") and whitespace bytes.
struct Segment {
    std::string_view bytes;
    bool is_word;
};

std::vector<Segment> segment_bytes(std::string_view text) {
    std::vector<Segment> segments;
    std::size_t i = 0;
    while (i < text.size()) {
        bool word = !is_ascii_space(static_cast<unsigned char>(text[i]));
        std::size_t j = i + 1;
        while (j < text.size() &&
               is_ascii_space(static_cast<unsigned char>(text[j])) != word) {
            ++j;
        }
        segments.push_back({text.substr(i, j - i), word});
        i = j;
    }
    return segments;
}

// Replaces all non-overlapping occurrences of (l, r), scanning left to right.
void apply_merge(std::vector<std::uint32_t>& symbols, std::uint32_t l, std::uint32_t r,
                 std::uint32_t merged) {
    std::size_t write = 0;
    std::size_t read = 0;
    while (read < symbols.size()) {
        if (read + 1 < symbols.size() && symbols[read] == l && symbols[read + 1] == r) {
            symbols[write++] = merged;
            read += 2;
        } else {
            symbols[write++] = symbols[read++];
        }
    }
    symbols.resize(write);
}

} // namespace

Tokenizer::Tokenizer() {
    vocab_.reserve(kByteVocab);
    for (std::size_t b = 0; b < kByteVocab; ++b)
        vocab_.push_back(std::string(1, static_cast<char>(b)));
}

Tokenizer Tokenizer::byte_baseline() { return Tokenizer(); }

void Tokenizer::rebuild_merge_index() {
    merge_index_.clear();
    merge_index_.reserve(merges_.size());
    for (std::size_t i = 0; i < merges_.size(); ++i) {
        merge_index_.emplace_back(pack_pair(merges_[i].first, merges_[i].second),
                                  static_cast<TokenId>(kByteVocab + i));
    }
    std::sort(merge_index_.begin(), merge_index_.end());
}

Tokenizer Tokenizer::train(const Corpus& corpus, std::size_t vocab_size, std::uint64_t /*seed*/) {
    if (corpus.empty()) throw std::runtime_error("tokenizer: empty training corpus");
    if (vocab_size < kByteVocab + 1)
        throw std::runtime_error("tokenizer: vocab_size must be at least 257, got " +
                                 std::to_string(vocab_size));

    // Frequency table over distinct words. The map is re-sorted so word
    // indices (and with them every later tie-break) are platform-stable.
    std::unordered_map<std::string, std::uint64_t> freq;
    for (const Document& doc : corpus) {
        for (const Segment& seg : segment_bytes(doc.text)) {
            if (seg.is_word) freq[std::string(seg.bytes)]++;
        }
    }
    std::vector<std::pair<std::string, std::uint64_t>> sorted_words(freq.begin(), freq.end());
    std::sort(sorted_words.begin(), sorted_words.end());
    freq.clear();

    struct TrainWord {
        std::vector<std::uint32_t> symbols;
        std::uint64_t freq;
    };
    std::vector<TrainWord> words;
    words.reserve(sorted_words.size());
    for (auto& [text, count] : sorted_words) {
        TrainWord w;
        w.freq = count;
        w.symbols.reserve(text.size());
        for (unsigned char b : text) w.symbols.push_back(b);
        words.push_back(std::move(w));
    }
    sorted_words.clear();
    sorted_words.shrink_to_fit();

    Tokenizer tok;

    // Live pair counts plus an ordered view for best-pair selection:
    // count descending, then lexicographic (left bytes, right bytes).
    std::unordered_map<std::uint64_t, std::uint64_t> pair_counts;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> pair_words;

    auto pair_less = [&tok](const std::pair<std::uint64_t, std::uint64_t>& a,
                            const std::pair<std::uint64_t, std::uint64_t>& b) {
        if (a.first != b.first) return a.first > b.first; // higher count first
        std::uint32_t al = static_cast<std::uint32_t>(a.second >> 32);
        std::uint32_t ar = static_cast<std::uint32_t>(a.second & 0xFFFFFFFFu);
        std::uint32_t bl = static_cast<std::uint32_t>(b.second >> 32);
        std::uint32_t br = static_cast<std::uint32_t>(b.second & 0xFFFFFFFFu);
        if (tok.vocab_[al] != tok.vocab_[bl]) return tok.vocab_[al] < tok.vocab_[bl];
        return tok.vocab_[ar] < tok.vocab_[br];
    };
    std::set<std::pair<std::uint64_t, std::uint64_t>, decltype(pair_less)> best_index(pair_less);

    auto bump_pair = [&](std::uint64_t packed, std::int64_t delta, std::uint32_t word_idx) {
        auto it = pair_counts.find(packed);
        std::uint64_t old_count = it == pair_counts.end() ? 0 : it->second;
        if (old_count > 0) best_index.erase({old_count, packed});
        std::int64_t next = static_cast<std::int64_t>(old_count) + delta;
        if (next <= 0) {
            if (it != pair_counts.end()) pair_counts.erase(it);
            return;
        }
        pair_counts[packed] = static_cast<std::uint64_t>(next);
        best_index.insert({static_cast<std::uint64_t>(next), packed});
        if (delta > 0 && word_idx != UINT32_MAX) pair_words[packed].push_back(word_idx);
    };

    for (std::uint32_t wi = 0; wi < words.size(); ++wi) {
        const auto& symbols = words[wi].symbols;
        for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
            bump_pair(pack_pair(symbols[i], symbols[i + 1]),
                      static_cast<std::int64_t>(words[wi].freq), wi);
        }
    }

    while (tok.vocab_.size() < vocab_size && !best_index.empty()) {
        auto [count, packed] = *best_index.begin();
        std::uint32_t left = static_cast<std::uint32_t>(packed >> 32);
        std::uint32_t right = static_cast<std::uint32_t>(packed & 0xFFFFFFFFu);
        std::uint32_t merged = static_cast<std::uint32_t>(tok.vocab_.size());
        tok.vocab_.push_back(tok.vocab_[left] + tok.vocab_[right]);
        tok.merges_.emplace_back(left, right);

        auto touched_it = pair_words.find(packed);
        std::vector<std::uint32_t> touched;
        if (touched_it != pair_words.end()) {
            touched = std::move(touched_it->second);
            pair_words.erase(touched_it);
        }
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

        for (std::uint32_t wi : touched) {
            auto& symbols = words[wi].symbols;
            bool contains = false;
            for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
                if (symbols[i] == left && symbols[i + 1] == right) {
                    contains = true;
                    break;
                }
            }
            if (!contains) continue; // stale registration from an earlier state

            std::int64_t f = static_cast<std::int64_t>(words[wi].freq);
            for (std::size_t i = 0; i + 1 < symbols.size(); ++i)
                bump_pair(pack_pair(symbols[i], symbols[i + 1]), -f, UINT32_MAX);
            apply_merge(symbols, left, right, merged);
            for (std::size_t i = 0; i + 1 < symbols.size(); ++i)
                bump_pair(pack_pair(symbols[i], symbols[i + 1]), f, wi);
        }
        // All occurrences were just merged away.
        pair_counts.erase(packed);
        best_index.erase({count, packed});
    }

    tok.rebuild_merge_index();
    return tok;
}

std::vector<Tokenizer::TokenId> Tokenizer::encode_word(const std::string& word) const {
    std::vector<std::uint32_t> symbols;
    symbols.reserve(word.size());
    for (unsigned char b : word) symbols.push_back(b);

    while (symbols.size() > 1) {
        // Lowest merge id == earliest learned == highest priority.
        TokenId best_id = std::numeric_limits<TokenId>::max();
        std::uint32_t best_left = 0, best_right = 0;
        for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
            std::uint64_t packed = pack_pair(symbols[i], symbols[i + 1]);
            auto it = std::lower_bound(merge_index_.begin(), merge_index_.end(),
                                       std::pair<std::uint64_t, TokenId>{packed, 0});
            if (it != merge_index_.end() && it->first == packed && it->second < best_id) {
                best_id = it->second;
                best_left = symbols[i];
                best_right = symbols[i + 1];
            }
        }
        if (best_id == std::numeric_limits<TokenId>::max()) break;
        apply_merge(symbols, best_left, best_right, best_id);
    }
    return symbols;
}

std::vector<Tokenizer::TokenId> Tokenizer::encode(const std::string& text) const {
    std::vector<TokenId> ids;
    ids.reserve(text.size() / 2 + 1);
    for (const Segment& seg : segment_bytes(text)) {
        if (seg.is_word) {
            auto word_ids = encode_word(std::string(seg.bytes));
            ids.insert(ids.end(), word_ids.begin(), word_ids.end());
        } else {
            for (unsigned char b : seg.bytes) ids.push_back(b);
        }
    }
    return ids;
}

std::string Tokenizer::decode(const std::vector<TokenId>& ids) const {
    std::string out;
    for (TokenId id : ids) {
        if (id >= vocab_.size())
            throw std::out_of_range("tokenizer: unknown token id " + std::to_string(id));
        out += vocab_[id];
    }
    return out;
}

void Tokenizer::save(const std::string& path) const {
    ordered_json doc;
    doc["format"] = "winnow-bpe";
    doc["version"] = 1;
    doc["base"] = "bytes";
    doc["vocab_size"] = vocab_.size();
    ordered_json merges = ordered_json::array();
    for (const auto& [l, r] : merges_) merges.push_back({l, r});
    doc["merges"] = std::move(merges);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("tokenizer: cannot write " + path);
    out << doc.dump() << '\n';
}

Tokenizer Tokenizer::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("tokenizer: cannot open " + path);
    ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("tokenizer: malformed model " + path + ": " + e.what());
    }
    if (!doc.contains("format") || doc["format"] != "winnow-bpe")
        throw std::runtime_error("tokenizer: " + path + " is not a winnow-bpe model");

    Tokenizer tok;
    for (const auto& entry : doc["merges"]) {
        std::uint32_t l = entry.at(0).get<std::uint32_t>();
        std::uint32_t r = entry.at(1).get<std::uint32_t>();
        if (l >= tok.vocab_.size() || r >= tok.vocab_.size())
            throw std::runtime_error("tokenizer: merge references unknown token id");
        tok.merges_.emplace_back(l, r);
        tok.vocab_.push_back(tok.vocab_[l] + tok.vocab_[r]);
    }
    tok.rebuild_merge_index();
    return tok;
}

TokenCounts count_tokens(const Tokenizer& tokenizer, const std::string& name,
                         const std::vector<std::string>& sentences) {
    TokenCounts counts;
    counts.name = name;
    counts.tokens_per_sentence.reserve(sentences.size());
    for (const std::string& s : sentences) {
        std::uint64_t n = tokenizer.encode(s).size();
        counts.tokens_per_sentence.push_back(n);
        counts.total_tokens += n;
    }
    return counts;
}

TokenCounts whitespace_baseline_counts(const std::vector<std::string>& sentences) {
    TokenCounts counts;
    counts.name = "whitespace";
    counts.tokens_per_sentence.reserve(sentences.size());
    for (const std::string& s : sentences) {
        std::uint64_t n = uni::word_count(s);
        counts.tokens_per_sentence.push_back(n);
        counts.total_tokens += n;
    }
    return counts;
}

FertilityReport fertility_report(const std::vector<std::string>& sentences,
                                 const std::vector<TokenCounts>& rows,
                                 const std::string& baseline) {
    if (sentences.empty()) throw std::runtime_error("fertility: empty evaluation set");

    std::vector<std::uint64_t> words_per_sentence(sentences.size());
    std::uint64_t total_words = 0;
    std::uint64_t skipped = 0;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        words_per_sentence[i] = uni::word_count(sentences[i]);
        if (words_per_sentence[i] == 0) {
            ++skipped;
        } else {
            total_words += words_per_sentence[i];
        }
    }
    if (total_words == 0) throw std::runtime_error("fertility: every sentence is empty");

    const TokenCounts* base = nullptr;
    for (const TokenCounts& row : rows) {
        if (row.name == baseline) base = &row;
    }
    if (!base) throw std::runtime_error("fertility: baseline row \"" + baseline + "\" not found");

    FertilityReport report;
    report.sentence_count = sentences.size();
    report.skipped_empty = skipped;
    report.baseline = baseline;

    for (const TokenCounts& row : rows) {
        FertilityRow out;
        out.name = row.name;
        out.total_words = total_words;
        if (!row.tokens_per_sentence.empty()) {
            if (row.tokens_per_sentence.size() != sentences.size())
                throw std::runtime_error("fertility: row \"" + row.name +
                                         "\" has per-sentence counts for " +
                                         std::to_string(row.tokens_per_sentence.size()) +
                                         " sentences, evaluation set has " +
                                         std::to_string(sentences.size()));
            double sum_ratio = 0.0;
            std::uint64_t counted = 0;
            for (std::size_t i = 0; i < sentences.size(); ++i) {
                if (words_per_sentence[i] == 0) continue;
                out.total_tokens += row.tokens_per_sentence[i];
                sum_ratio += static_cast<double>(row.tokens_per_sentence[i]) /
                             static_cast<double>(words_per_sentence[i]);
                ++counted;
            }
            out.macro_fertility = sum_ratio / static_cast<double>(counted);
            out.has_macro = true;
        } else {
            out.total_tokens = row.total_tokens;
            out.has_macro = false;
        }
        out.micro_fertility =
            static_cast<double>(out.total_tokens) / static_cast<double>(total_words);
        report.rows.push_back(std::move(out));
    }

    std::uint64_t base_tokens = 0;
    for (const FertilityRow& row : report.rows) {
        if (row.name == baseline) base_tokens = row.total_tokens;
    }
    for (FertilityRow& row : report.rows) {
        row.savings_vs_baseline =
            base_tokens == 0 ? 0.0
                             : 1.0 - static_cast<double>(row.total_tokens) /
                                         static_cast<double>(base_tokens);
    }
    return report;
}

} // namespace winnow
