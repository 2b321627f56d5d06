#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "winnow/document.hpp"

namespace winnow {

// Distinct 64-bit hashes of word-3-grams, kept sorted for set arithmetic.
using ShingleSet = std::vector<std::uint64_t>;

using MinHashSignature = std::vector<std::uint64_t>;

struct NearDedupParams {
    double tau = 0.80;
    std::size_t k = 64;
    std::size_t bands = 16;
    std::size_t rows = 4;
    std::uint64_t seed = 0;
};

struct NearDedupReport {
    std::uint64_t input_count = 0;
    std::uint64_t kept_count = 0;
    std::uint64_t removed_count = 0;
    std::uint64_t cluster_count = 0;   // clusters with >= 2 members
    std::uint64_t docs_covered = 0;    // documents inside those clusters
    std::uint64_t candidate_pairs = 0;
    std::uint64_t verified_pairs = 0;  // exact Jaccard >= tau
};

// Consecutive word triples joined by a single space, hashed to 64 bits
// (FNV-1a then a splitmix64 finalizer), duplicates collapsed. Fewer than
// three words -> empty set.
ShingleSet shingle(const std::string& text);

// |A∩B| / |A∪B|; both empty -> 0 (short documents are treated as unique).
double jaccard(const ShingleSet& a, const ShingleSet& b);

// Component i = min over shingles g of mix64(g ^ key_i); keys are drawn from
// SeededRng(seed). The per-component match rate is an unbiased estimate of
// the Jaccard similarity. Empty input is a caller error.
MinHashSignature minhash(const ShingleSet& shingles, std::size_t k, std::uint64_t seed);

double minhash_estimate(const MinHashSignature& a, const MinHashSignature& b);

// Probability that a pair with true Jaccard s shares at least one full band:
// 1 - (1 - s^r)^b.
double s_curve(double s, std::size_t bands, std::size_t rows);

// Similarity where the candidate probability crosses 1-1/e: (1/b)^(1/r).
double s_curve_threshold(std::size_t bands, std::size_t rows);

// All pairs (i, j), i < j, agreeing on at least one full band
// (band i = signature components [i*rows, (i+1)*rows)); sorted, deduplicated.
std::vector<std::pair<std::uint32_t, std::uint32_t>> lsh_candidates(
    const std::vector<MinHashSignature>& signatures, std::size_t bands, std::size_t rows);

// Full Phase 4: shingle, sign, band, verify candidates by exact Jaccard on
// the shingle sets, merge verified pairs with union-find, and keep each
// cluster's longest document (code points; ties to the smallest id).
// When verified_out is non-null every merged pair is appended to it.
std::pair<Corpus, NearDedupReport> dedup_near(
    const Corpus& input, const NearDedupParams& params, unsigned workers = 0,
    std::vector<std::pair<std::uint32_t, std::uint32_t>>* verified_out = nullptr);

} // namespace winnow
