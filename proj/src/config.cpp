#include "winnow/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "winnow/sha256.hpp"

namespace winnow {

namespace {

void require_fraction(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
        throw ConfigError(std::string(name) + " must be in [0,1], got " + std::to_string(v));
}

void require_positive(std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string(name) + " must be positive");
}

} // namespace

void PipelineConfig::validate() const {
    if (sources.empty()) throw ConfigError("at least one source is required");
    std::set<std::string> names;
    for (const auto& s : sources) {
        if (s.name.empty()) throw ConfigError("source with empty name");
        if (s.path.empty()) throw ConfigError("source \"" + s.name + "\" has no path");
        if (!names.insert(s.name).second)
            throw ConfigError("duplicate source name \"" + s.name + "\"");
    }
    if (target_language.empty()) throw ConfigError("target_language is required");
    require_fraction(lid_threshold, "lid_threshold");
    require_fraction(jaccard_tau, "jaccard_tau");
    require_fraction(quality_drop_fraction, "quality_drop_fraction");
    if (quality_min_threshold >= 0.0) require_fraction(quality_min_threshold, "quality_min_threshold");
    require_fraction(split_fraction, "split_fraction");
    require_positive(min_words, "min_words");
    require_positive(minhash_k, "minhash_k");
    require_positive(lsh_bands, "lsh_bands");
    require_positive(lsh_rows, "lsh_rows");
    require_positive(seed_min_words, "seed_min_words");
    require_positive(ngram_order, "ngram_order");
    if (vocab_size < 257)
        throw ConfigError("vocab_size must be at least 257 (256 byte tokens + 1 merge)");
    if (lsh_bands * lsh_rows != minhash_k)
        throw ConfigError("lsh_bands * lsh_rows must equal minhash_k (" +
                          std::to_string(lsh_bands) + "*" + std::to_string(lsh_rows) +
                          " != " + std::to_string(minhash_k) + ")");
    if (!quality_seed_source.empty()) {
        bool found = false;
        for (const auto& s : sources) found = found || s.name == quality_seed_source;
        if (!found)
            throw ConfigError("quality_seed_source \"" + quality_seed_source +
                              "\" does not name a configured source");
    }
    if (quality_seed_path.empty() && quality_seed_source.empty())
        throw ConfigError("either quality_seed_path or quality_seed_source is required");
    if (lid_model.empty() && lid_seeds.size() < 2)
        throw ConfigError("either lid_model or at least two lid_seeds entries are required");
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::stringstream raw;
    raw << in.rdbuf();

    YAML::Node root;
    try {
        root = YAML::Load(raw.str());
    } catch (const YAML::Exception& e) {
        throw ConfigError(path + ": " + e.what());
    }

    PipelineConfig cfg;
    cfg.config_hash = sha256_hex(raw.str());
    try {
        if (root["target_language"]) cfg.target_language = root["target_language"].as<std::string>();
        if (root["lid_threshold"]) cfg.lid_threshold = root["lid_threshold"].as<double>();
        if (root["min_words"]) cfg.min_words = root["min_words"].as<std::size_t>();
        if (root["minhash_k"]) cfg.minhash_k = root["minhash_k"].as<std::size_t>();
        if (root["lsh_bands"]) cfg.lsh_bands = root["lsh_bands"].as<std::size_t>();
        if (root["lsh_rows"]) cfg.lsh_rows = root["lsh_rows"].as<std::size_t>();
        if (root["jaccard_tau"]) cfg.jaccard_tau = root["jaccard_tau"].as<double>();
        if (root["quality_drop_fraction"])
            cfg.quality_drop_fraction = root["quality_drop_fraction"].as<double>();
        if (root["quality_min_threshold"])
            cfg.quality_min_threshold = root["quality_min_threshold"].as<double>();
        if (root["seed_min_words"]) cfg.seed_min_words = root["seed_min_words"].as<std::size_t>();
        if (root["ngram_order"]) cfg.ngram_order = root["ngram_order"].as<std::size_t>();
        if (root["split_fraction"]) cfg.split_fraction = root["split_fraction"].as<double>();
        if (root["vocab_size"]) cfg.vocab_size = root["vocab_size"].as<std::size_t>();
        if (root["seed"]) cfg.seed = root["seed"].as<std::uint64_t>();
        if (root["lid_model"]) cfg.lid_model = root["lid_model"].as<std::string>();
        if (root["quality_seed_path"]) cfg.quality_seed_path = root["quality_seed_path"].as<std::string>();
        if (root["quality_seed_source"])
            cfg.quality_seed_source = root["quality_seed_source"].as<std::string>();

        if (root["sources"]) {
            for (const auto& node : root["sources"]) {
                SourceSpec spec;
                spec.name = node["name"].as<std::string>();
                spec.path = node["path"].as<std::string>();
                spec.format = node["format"] ? parse_format(node["format"].as<std::string>())
                                             : infer_format(spec.path);
                cfg.sources.push_back(spec);
            }
        }
        if (root["lid_seeds"]) {
            for (const auto& kv : root["lid_seeds"]) {
                cfg.lid_seeds[kv.first.as<std::string>()] = kv.second.as<std::string>();
            }
        }
    } catch (const YAML::Exception& e) {
        throw ConfigError(path + ": " + e.what());
    } catch (const CorpusIoError& e) {
        throw ConfigError(path + ": " + e.what());
    }

    cfg.validate();
    return cfg;
}

} // namespace winnow
