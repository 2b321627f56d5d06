#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "winnow/document.hpp"

namespace winnow {

struct ReleaseManifest {
    std::string train_path;
    std::string train_sha256;
    std::string validation_path;
    std::string validation_sha256;
    std::uint64_t train_count = 0;
    std::uint64_t validation_count = 0;
    std::uint64_t train_tokens = 0;      // whitespace-word approximation
    std::uint64_t validation_tokens = 0;
    std::map<std::string, double> source_fractions; // over the full release
    std::string config_hash;
    std::string tokenizer_sha256;
    std::uint64_t timestamp = 0; // unix seconds; SOURCE_DATE_EPOCH wins when set
};

struct ReleaseOptions {
    double split_fraction = 0.95;
    std::uint64_t seed = 0;
    std::string config_hash;
};

// Train-side size: ceil(split_fraction * n), clamped to [1, n-1] so neither
// side is empty.
std::size_t train_count_for(std::size_t n, double split_fraction);

// Shuffles with the deterministic Fisher-Yates permutation, puts the first
// train_count_for(N, split_fraction) documents in train and the rest in
// validation, writes train.jsonl / validation.jsonl / SHASUMS /
// manifest.json under out_dir. Requires N >= 2.
ReleaseManifest split_release(const Corpus& input, const std::string& out_dir,
                              const ReleaseOptions& options);

void write_manifest_json(const ReleaseManifest& manifest, const std::string& path);

} // namespace winnow
