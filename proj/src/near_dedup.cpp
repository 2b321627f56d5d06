#include "winnow/near_dedup.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_map>

#include "winnow/parallel.hpp"
#include "winnow/rng.hpp"
#include "winnow/unicode.hpp"

namespace winnow {

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
        for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<std::uint32_t>(i);
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]]; // path halving
            x = parent_[x];
        }
        return x;
    }

    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
};

} // namespace

ShingleSet shingle(const std::string& text) {
    auto words = uni::split_words(text);
    if (words.size() < 3) return {};
    ShingleSet out;
    out.reserve(words.size() - 2);
    std::string buf;
    for (std::size_t i = 0; i + 2 < words.size(); ++i) {
        buf.clear();
        buf.append(words[i]);
        buf.push_back(' ');
        buf.append(words[i + 1]);
        buf.push_back(' ');
        buf.append(words[i + 2]);
        out.push_back(mix64(fnv1a64(buf.data(), buf.size())));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double jaccard(const ShingleSet& a, const ShingleSet& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++inter;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    std::size_t uni_size = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni_size);
}

MinHashSignature minhash(const ShingleSet& shingles, std::size_t k, std::uint64_t seed) {
    if (shingles.empty())
        throw std::invalid_argument("minhash: empty shingle set (callers must treat "
                                    "short documents as never-candidates)");
    SeededRng rng(seed);
    std::vector<std::uint64_t> keys(k);
    for (auto& key : keys) key = rng.next();

    MinHashSignature sig(k, UINT64_MAX);
    for (std::uint64_t g : shingles) {
        for (std::size_t i = 0; i < k; ++i) {
            std::uint64_t h = mix64(g ^ keys[i]);
            if (h < sig[i]) sig[i] = h;
        }
    }
    return sig;
}

double minhash_estimate(const MinHashSignature& a, const MinHashSignature& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("minhash_estimate: signature length mismatch");
    std::size_t match = 0;
    for (std::size_t i = 0; i < a.size(); ++i) match += a[i] == b[i] ? 1 : 0;
    return static_cast<double>(match) / static_cast<double>(a.size());
}

double s_curve(double s, std::size_t bands, std::size_t rows) {
    double per_band = std::pow(s, static_cast<double>(rows));
    return 1.0 - std::pow(1.0 - per_band, static_cast<double>(bands));
}

double s_curve_threshold(std::size_t bands, std::size_t rows) {
    return std::pow(1.0 / static_cast<double>(bands), 1.0 / static_cast<double>(rows));
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> lsh_candidates(
    const std::vector<MinHashSignature>& signatures, std::size_t bands, std::size_t rows) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::string key(rows * sizeof(std::uint64_t) , '\0');
    for (std::size_t band = 0; band < bands; ++band) {
        std::unordered_map<std::string, std::vector<std::uint32_t>> buckets;
        for (std::size_t doc = 0; doc < signatures.size(); ++doc) {
            if (signatures[doc].empty()) continue; // shingle-less document
            // Explicit little-endian layout keeps bucket keys platform-stable.
            for (std::size_t r = 0; r < rows; ++r) {
                std::uint64_t v = signatures[doc][band * rows + r];
                for (std::size_t byte = 0; byte < 8; ++byte)
                    key[r * 8 + byte] = static_cast<char>((v >> (8 * byte)) & 0xFF);
            }
            buckets[key].push_back(static_cast<std::uint32_t>(doc));
        }
        for (const auto& [_, members] : buckets) {
            for (std::size_t i = 0; i + 1 < members.size(); ++i)
                for (std::size_t j = i + 1; j < members.size(); ++j)
                    pairs.emplace_back(members[i], members[j]);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
}

std::pair<Corpus, NearDedupReport> dedup_near(
    const Corpus& input, const NearDedupParams& params, unsigned workers,
    std::vector<std::pair<std::uint32_t, std::uint32_t>>* verified_out) {
    if (params.bands * params.rows != params.k)
        throw std::invalid_argument("dedup_near: bands*rows must equal k");

    NearDedupReport report;
    report.input_count = input.size();
    unsigned nworkers = resolve_workers(workers);

    std::vector<ShingleSet> shingles(input.size());
    std::vector<MinHashSignature> signatures(input.size());
    parallel_chunks(input.size(), nworkers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            shingles[i] = shingle(input[i].text);
            if (!shingles[i].empty())
                signatures[i] = minhash(shingles[i], params.k, params.seed);
        }
    });

    auto candidates = lsh_candidates(signatures, params.bands, params.rows);
    report.candidate_pairs = candidates.size();

    std::vector<char> verified(candidates.size(), 0);
    parallel_chunks(candidates.size(), nworkers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto [a, b] = candidates[i];
            verified[i] = jaccard(shingles[a], shingles[b]) >= params.tau ? 1 : 0;
        }
    });

    UnionFind uf(input.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!verified[i]) continue;
        report.verified_pairs++;
        uf.unite(candidates[i].first, candidates[i].second);
        if (verified_out) verified_out->push_back(candidates[i]);
    }

    // Representative per cluster: most code points, ties to smallest id.
    std::vector<std::size_t> text_len(input.size());
    for (std::size_t i = 0; i < input.size(); ++i)
        text_len[i] = uni::codepoint_count(input[i].text);

    std::unordered_map<std::uint32_t, std::uint32_t> representative;
    std::unordered_map<std::uint32_t, std::uint32_t> members;
    for (std::size_t i = 0; i < input.size(); ++i) {
        std::uint32_t root = uf.find(static_cast<std::uint32_t>(i));
        members[root]++;
        auto [it, inserted] = representative.try_emplace(root, static_cast<std::uint32_t>(i));
        if (!inserted) {
            std::uint32_t best = it->second;
            if (text_len[i] > text_len[best] ||
                (text_len[i] == text_len[best] && input[i].id < input[best].id)) {
                it->second = static_cast<std::uint32_t>(i);
            }
        }
    }
    for (const auto& [root, count] : members) {
        if (count >= 2) {
            report.cluster_count++;
            report.docs_covered += count;
        }
    }

    Corpus kept;
    kept.reserve(input.size());
    for (std::size_t i = 0; i < input.size(); ++i) {
        std::uint32_t root = uf.find(static_cast<std::uint32_t>(i));
        if (representative[root] == static_cast<std::uint32_t>(i)) {
            kept.push_back(input[i]);
        }
    }
    report.kept_count = kept.size();
    report.removed_count = report.input_count - report.kept_count;
    return {std::move(kept), report};
}

} // namespace winnow
