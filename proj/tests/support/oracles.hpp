#pragma once

// Brute-force reference implementations, written from the definitions and
// kept independent of the library code paths they check. Shingles here are
// raw word-3-gram strings (no hashing), Jaccard is computed on string sets,
// and clustering is a quadratic all-pairs union-find.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "winnow/document.hpp"

namespace oracle {

inline std::vector<std::string> split_ascii_words(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> words;
    std::string word;
    while (in >> word) words.push_back(word);
    return words;
}

inline std::set<std::string> shingle_strings(const std::string& text) {
    auto words = split_ascii_words(text);
    std::set<std::string> out;
    for (std::size_t i = 0; i + 2 < words.size(); ++i)
        out.insert(words[i] + " " + words[i + 1] + " " + words[i + 2]);
    return out;
}

inline double jaccard_strings(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0;
    for (const auto& g : a) inter += b.count(g);
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

// Ids of documents a faithful near-dedup must remove: all-pairs exact
// Jaccard >= tau edges, connected components, keep the longest text
// (ties to the smallest id) per component.
inline std::set<std::string> near_dup_removed(const winnow::Corpus& corpus, double tau) {
    const std::size_t n = corpus.size();
    std::vector<std::set<std::string>> shingles(n);
    for (std::size_t i = 0; i < n; ++i) shingles[i] = shingle_strings(corpus[i].text);

    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    for (std::size_t i = 0; i < n; ++i) {
        if (shingles[i].empty()) continue; // empty sets never cluster
        for (std::size_t j = i + 1; j < n; ++j) {
            if (shingles[j].empty()) continue;
            if (jaccard_strings(shingles[i], shingles[j]) >= tau) {
                parent[find(i)] = find(j);
            }
        }
    }

    std::vector<std::size_t> codepoints(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t count = 0;
        for (char c : corpus[i].text)
            if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++count;
        codepoints[i] = count;
    }

    std::vector<std::size_t> best(n, SIZE_MAX);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t root = find(i);
        if (best[root] == SIZE_MAX) {
            best[root] = i;
            continue;
        }
        std::size_t b = best[root];
        if (codepoints[i] > codepoints[b] ||
            (codepoints[i] == codepoints[b] && corpus[i].id < corpus[b].id)) {
            best[root] = i;
        }
    }

    std::set<std::string> removed;
    for (std::size_t i = 0; i < n; ++i) {
        if (best[find(i)] != i) removed.insert(corpus[i].id);
    }
    return removed;
}

} // namespace oracle
