#include "winnow/unicode.hpp"

#include <algorithm>
#include <array>
#include <iterator>
#include <stdexcept>

namespace winnow::uni {

namespace {

#include "unicode_data.inc"

// Hangul syllable composition/decomposition is algorithmic (UAX #15 §3.12).
constexpr char32_t kHangulSBase = 0xAC00;
constexpr char32_t kHangulLBase = 0x1100;
constexpr char32_t kHangulVBase = 0x1161;
constexpr char32_t kHangulTBase = 0x11A7;
constexpr int kHangulLCount = 19;
constexpr int kHangulVCount = 21;
constexpr int kHangulTCount = 28;
constexpr int kHangulNCount = kHangulVCount * kHangulTCount; // 588
constexpr int kHangulSCount = kHangulLCount * kHangulNCount; // 11172

const CaseMapEntry* find_lower(char32_t cp) {
    auto it = std::lower_bound(std::begin(kLowerTable), std::end(kLowerTable), cp,
                               [](const CaseMapEntry& e, char32_t c) { return e.cp < c; });
    if (it != std::end(kLowerTable) && it->cp == cp) return &*it;
    return nullptr;
}

unsigned char ccc(char32_t cp) {
    auto it = std::lower_bound(std::begin(kCccTable), std::end(kCccTable), cp,
                               [](const CccEntry& e, char32_t c) { return e.cp < c; });
    if (it != std::end(kCccTable) && it->cp == cp) return it->ccc;
    return 0;
}

const DecompEntry* find_decomp(char32_t cp) {
    auto it = std::lower_bound(std::begin(kDecompTable), std::end(kDecompTable), cp,
                               [](const DecompEntry& e, char32_t c) { return e.cp < c; });
    if (it != std::end(kDecompTable) && it->cp == cp) return &*it;
    return nullptr;
}

// Primary composite for the pair, or 0.
char32_t compose_pair(char32_t a, char32_t b) {
    // Hangul L+V and LV+T.
    if (a >= kHangulLBase && a < kHangulLBase + kHangulLCount &&
        b >= kHangulVBase && b < kHangulVBase + kHangulVCount) {
        int l = static_cast<int>(a - kHangulLBase);
        int v = static_cast<int>(b - kHangulVBase);
        return kHangulSBase + static_cast<char32_t>((l * kHangulVCount + v) * kHangulTCount);
    }
    if (a >= kHangulSBase && a < kHangulSBase + kHangulSCount &&
        (a - kHangulSBase) % kHangulTCount == 0 &&
        b > kHangulTBase && b < kHangulTBase + kHangulTCount) {
        return a + (b - kHangulTBase);
    }
    auto it = std::lower_bound(
        std::begin(kCompTable), std::end(kCompTable), std::pair<char32_t, char32_t>{a, b},
        [](const CompEntry& e, const std::pair<char32_t, char32_t>& key) {
            if (e.first != key.first) return e.first < key.first;
            return e.second < key.second;
        });
    if (it != std::end(kCompTable) && it->first == a && it->second == b) return it->composed;
    return 0;
}

void decompose_into(char32_t cp, std::u32string& out) {
    if (cp >= kHangulSBase && cp < kHangulSBase + kHangulSCount) {
        int index = static_cast<int>(cp - kHangulSBase);
        out.push_back(kHangulLBase + static_cast<char32_t>(index / kHangulNCount));
        out.push_back(kHangulVBase + static_cast<char32_t>((index % kHangulNCount) / kHangulTCount));
        int t = index % kHangulTCount;
        if (t != 0) out.push_back(kHangulTBase + static_cast<char32_t>(t));
        return;
    }
    if (const DecompEntry* e = find_decomp(cp)) {
        for (unsigned i = 0; i < e->len; ++i) out.push_back(kDecompData[e->offset + i]);
        return;
    }
    out.push_back(cp);
}

// Canonical ordering: stable sort of each nonzero-ccc run by combining class.
void canonical_order(std::u32string& cps) {
    std::size_t i = 0;
    while (i < cps.size()) {
        if (ccc(cps[i]) == 0) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < cps.size() && ccc(cps[j]) != 0) ++j;
        std::stable_sort(cps.begin() + static_cast<std::ptrdiff_t>(i),
                         cps.begin() + static_cast<std::ptrdiff_t>(j),
                         [](char32_t a, char32_t b) { return ccc(a) < ccc(b); });
        i = j;
    }
}

std::u32string decode_or_throw(std::string_view utf8) {
    std::size_t at = 0;
    auto cps = decode_utf8(utf8, &at);
    if (!cps) throw std::invalid_argument("invalid UTF-8 at byte offset " + std::to_string(at));
    return std::move(*cps);
}

} // namespace

std::optional<std::u32string> decode_utf8(std::string_view bytes, std::size_t* error_offset) {
    std::u32string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    const auto fail = [&](std::size_t at) -> std::optional<std::u32string> {
        if (error_offset) *error_offset = at;
        return std::nullopt;
    };
    while (i < bytes.size()) {
        unsigned char b0 = static_cast<unsigned char>(bytes[i]);
        if (b0 < 0x80) {
            out.push_back(b0);
            ++i;
            continue;
        }
        int len;
        char32_t cp;
        char32_t min_cp;
        if ((b0 & 0xE0) == 0xC0) {
            len = 2; cp = b0 & 0x1F; min_cp = 0x80;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3; cp = b0 & 0x0F; min_cp = 0x800;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4; cp = b0 & 0x07; min_cp = 0x10000;
        } else {
            return fail(i);
        }
        if (i + static_cast<std::size_t>(len) > bytes.size()) return fail(i);
        for (int k = 1; k < len; ++k) {
            unsigned char bk = static_cast<unsigned char>(bytes[i + static_cast<std::size_t>(k)]);
            if ((bk & 0xC0) != 0x80) return fail(i + static_cast<std::size_t>(k));
            cp = (cp << 6) | (bk & 0x3F);
        }
        if (cp < min_cp) return fail(i);                    // overlong
        if (cp >= 0xD800 && cp <= 0xDFFF) return fail(i);   // surrogate
        if (cp > 0x10FFFF) return fail(i);
        out.push_back(cp);
        i += static_cast<std::size_t>(len);
    }
    return out;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode_utf8(const std::u32string& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append_utf8(out, cp);
    return out;
}

bool is_valid_utf8(std::string_view bytes, std::size_t* error_offset) {
    return decode_utf8(bytes, error_offset).has_value();
}

bool is_whitespace(char32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
        case 0x20: case 0x85: case 0xA0: case 0x1680:
        case 0x2000: case 0x2001: case 0x2002: case 0x2003: case 0x2004:
        case 0x2005: case 0x2006: case 0x2007: case 0x2008: case 0x2009:
        case 0x200A: case 0x2028: case 0x2029: case 0x202F: case 0x205F:
        case 0x3000:
            return true;
        default:
            return false;
    }
}

std::u32string to_lower(const std::u32string& cps) {
    std::u32string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) {
        if (const CaseMapEntry* e = find_lower(cp)) {
            out.push_back(e->lo[0]);
            if (e->lo[1] != 0) out.push_back(e->lo[1]);
        } else {
            out.push_back(cp);
        }
    }
    return out;
}

std::string to_lower_utf8(std::string_view utf8) {
    return encode_utf8(to_lower(decode_or_throw(utf8)));
}

std::u32string nfc(const std::u32string& cps) {
    if (cps.empty()) return {};

    std::u32string nfd;
    nfd.reserve(cps.size() + cps.size() / 4);
    for (char32_t cp : cps) decompose_into(cp, nfd);
    canonical_order(nfd);

    // Canonical recomposition (UAX #15 sample algorithm).
    std::u32string out;
    out.reserve(nfd.size());
    out.push_back(nfd[0]);
    std::size_t starter_pos = 0;
    char32_t starter = nfd[0];
    int last_class = ccc(starter);
    if (last_class != 0) last_class = 256; // leading combining mark: never compose into it
    for (std::size_t i = 1; i < nfd.size(); ++i) {
        char32_t ch = nfd[i];
        int ch_class = ccc(ch);
        char32_t composite = compose_pair(starter, ch);
        if (composite != 0 && (last_class < ch_class || last_class == 0)) {
            out[starter_pos] = composite;
            starter = composite;
        } else {
            if (ch_class == 0) {
                starter_pos = out.size();
                starter = ch;
            }
            last_class = ch_class;
            out.push_back(ch);
        }
    }
    return out;
}

std::string nfc_utf8(std::string_view utf8) {
    return encode_utf8(nfc(decode_or_throw(utf8)));
}

std::size_t word_count(std::string_view utf8) {
    std::size_t n = 0;
    bool in_word = false;
    for (char32_t cp : decode_or_throw(utf8)) {
        if (is_whitespace(cp)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++n;
        }
    }
    return n;
}

std::size_t codepoint_count(std::string_view utf8) {
    std::size_t n = 0;
    for (char c : utf8) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    }
    return n;
}

std::string collapse_whitespace(std::string_view utf8) {
    std::u32string cps = decode_or_throw(utf8);
    std::u32string out;
    out.reserve(cps.size());
    bool pending_space = false;
    for (char32_t cp : cps) {
        if (is_whitespace(cp)) {
            if (!out.empty()) pending_space = true;
        } else {
            if (pending_space) {
                out.push_back(U' ');
                pending_space = false;
            }
            out.push_back(cp);
        }
    }
    return encode_utf8(out);
}

std::string collapse_runs(std::string_view utf8) {
    std::u32string cps = decode_or_throw(utf8);
    std::u32string out;
    out.reserve(cps.size());
    char32_t prev = 0;
    std::size_t run = 0;
    for (char32_t cp : cps) {
        if (!out.empty() && cp == prev) {
            ++run;
        } else {
            prev = cp;
            run = 1;
        }
        if (run <= 3) out.push_back(cp);
    }
    return encode_utf8(out);
}

std::vector<std::string_view> split_words(std::string_view utf8) {
    std::vector<std::string_view> words;
    std::size_t i = 0;
    std::size_t word_start = 0;
    bool in_word = false;
    while (i < utf8.size()) {
        unsigned char b0 = static_cast<unsigned char>(utf8[i]);
        std::size_t len = b0 < 0x80 ? 1 : (b0 & 0xE0) == 0xC0 ? 2 : (b0 & 0xF0) == 0xE0 ? 3 : 4;
        char32_t cp;
        if (len == 1) {
            cp = b0;
        } else {
            cp = b0 & (0x7F >> len);
            for (std::size_t k = 1; k < len; ++k)
                cp = (cp << 6) | (static_cast<unsigned char>(utf8[i + k]) & 0x3F);
        }
        if (is_whitespace(cp)) {
            if (in_word) {
                words.push_back(utf8.substr(word_start, i - word_start));
                in_word = false;
            }
        } else if (!in_word) {
            word_start = i;
            in_word = true;
        }
        i += len;
    }
    if (in_word) words.push_back(utf8.substr(word_start));
    return words;
}

} // namespace winnow::uni
