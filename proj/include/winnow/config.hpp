#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "winnow/corpus_io.hpp"

namespace winnow {

struct SourceSpec {
    std::string name;
    std::string path;
    CorpusFormat format = CorpusFormat::jsonl;
};

// Single source of truth for every pipeline knob; loaded from one YAML file.
struct PipelineConfig {
    std::vector<SourceSpec> sources;

    std::string target_language = "so";
    double lid_threshold = 0.5;
    std::size_t min_words = 50;
    std::size_t minhash_k = 64;
    std::size_t lsh_bands = 16;
    std::size_t lsh_rows = 4;
    double jaccard_tau = 0.80;
    double quality_drop_fraction = 0.15;
    // Negative = unset. When set, Phase 5 drops below this absolute coverage
    // instead of taking the unconditional bottom percentile.
    double quality_min_threshold = -1.0;
    std::size_t seed_min_words = 200;
    std::size_t ngram_order = 5;
    double split_fraction = 0.95;
    std::size_t vocab_size = 16384;
    std::uint64_t seed = 0;

    // Phase 3 needs a classifier: either a pre-trained model file, or seed
    // corpora (label -> path) for the built-in character-n-gram model.
    std::string lid_model;
    std::map<std::string, std::string> lid_seeds;

    // Phase 5 seed corpus: an explicit path wins; otherwise the named source.
    std::string quality_seed_path;
    std::string quality_seed_source;

    // SHA-256 of the raw config file bytes (filled by load_config).
    std::string config_hash;

    void validate() const; // throws ConfigError
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

PipelineConfig load_config(const std::string& path);

} // namespace winnow
