#include "winnow/normalize.hpp"

#include <optional>

#include "winnow/parallel.hpp"
#include "winnow/unicode.hpp"

namespace winnow {

namespace {

// Windows-1252 maps these code points to bytes 0x80..0x9F; Latin-1 covers
// everything at or below 0xFF. Together they form the byte view used to
// detect UTF-8 round-trip artifacts.
std::optional<unsigned char> byte_view(char32_t cp) {
    if (cp <= 0xFF) return static_cast<unsigned char>(cp);
    switch (cp) {
        case 0x20AC: return 0x80; // EURO SIGN
        case 0x201A: return 0x82;
        case 0x0192: return 0x83;
        case 0x201E: return 0x84;
        case 0x2026: return 0x85;
        case 0x2020: return 0x86;
        case 0x2021: return 0x87;
        case 0x02C6: return 0x88;
        case 0x2030: return 0x89;
        case 0x0160: return 0x8A;
        case 0x2039: return 0x8B;
        case 0x0152: return 0x8C;
        case 0x017D: return 0x8E;
        case 0x2018: return 0x91;
        case 0x2019: return 0x92;
        case 0x201C: return 0x93;
        case 0x201D: return 0x94;
        case 0x2022: return 0x95;
        case 0x2013: return 0x96;
        case 0x2014: return 0x97;
        case 0x02DC: return 0x98;
        case 0x2122: return 0x99;
        case 0x0161: return 0x9A;
        case 0x203A: return 0x9B;
        case 0x0153: return 0x9C;
        case 0x017E: return 0x9E;
        case 0x0178: return 0x9F;
        default: return std::nullopt;
    }
}

// One repair round, or nullopt if the text is not a mis-decoding artifact.
std::optional<std::string> repair_once(const std::string& text) {
    auto cps = uni::decode_utf8(text);
    if (!cps) return std::nullopt;

    std::string bytes;
    bytes.reserve(cps->size());
    bool multibyte = false;
    for (char32_t cp : *cps) {
        auto b = byte_view(cp);
        if (!b) return std::nullopt;
        if (*b >= 0x80) multibyte = true;
        bytes.push_back(static_cast<char>(*b));
    }
    if (!multibyte) return std::nullopt; // pure ASCII: nothing to repair
    if (!uni::is_valid_utf8(bytes)) return std::nullopt;
    return bytes; // the byte view re-read as UTF-8

}

} // namespace

std::pair<std::string, bool> repair_mojibake(const std::string& text) {
    std::string current = text;
    for (int depth = 0; depth < 3; ++depth) {
        auto repaired = repair_once(current);
        if (!repaired) break;
        current = std::move(*repaired);
    }
    return {current, current != text};
}

std::pair<Corpus, NormalizeStats> phase2_normalize(const Corpus& input, std::size_t min_words,
                                                   unsigned workers) {
    struct Row {
        std::string text;
        bool fixed = false;
        bool keep = false;
    };
    std::vector<Row> rows(input.size());
    parallel_chunks(input.size(), resolve_workers(workers), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto [repaired, fixed] = repair_mojibake(input[i].text);
            std::string text = uni::collapse_runs(uni::collapse_whitespace(uni::nfc_utf8(repaired)));
            rows[i].fixed = fixed;
            rows[i].keep = uni::word_count(text) >= min_words;
            rows[i].text = std::move(text);
        }
    });

    NormalizeStats stats;
    stats.input_count = input.size();
    Corpus kept;
    kept.reserve(input.size());
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (rows[i].fixed) stats.mojibake_fixed++;
        if (!rows[i].keep) {
            stats.short_dropped++;
            continue;
        }
        Document doc = input[i];
        doc.text = std::move(rows[i].text);
        if (rows[i].fixed) doc.meta["ftfy_fixed"] = "true";
        kept.push_back(std::move(doc));
    }
    stats.kept_count = kept.size();
    return {std::move(kept), stats};
}

} // namespace winnow
