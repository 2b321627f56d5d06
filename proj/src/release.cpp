#include "winnow/release.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "winnow/corpus_io.hpp"
#include "winnow/sha256.hpp"
#include "winnow/unicode.hpp"

namespace winnow {

namespace {

using ordered_json = nlohmann::ordered_json;

std::uint64_t resolve_timestamp() {
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return v;
    }
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
}

std::uint64_t token_sum(const Corpus& corpus) {
    std::uint64_t total = 0;
    for (const Document& doc : corpus) total += uni::word_count(doc.text);
    return total;
}

} // namespace

std::size_t train_count_for(std::size_t n, double split_fraction) {
    std::size_t train_count =
        static_cast<std::size_t>(std::ceil(split_fraction * static_cast<double>(n)));
    if (train_count >= n) train_count = n - 1;
    if (train_count == 0) train_count = 1;
    return train_count;
}

ReleaseManifest split_release(const Corpus& input, const std::string& out_dir,
                              const ReleaseOptions& options) {
    if (input.size() < 2)
        throw std::runtime_error("release: need at least 2 documents to split, got " +
                                 std::to_string(input.size()));
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    Corpus shuffled = shuffle(input, options.seed);
    std::size_t train_count = train_count_for(shuffled.size(), options.split_fraction);

    Corpus train(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(train_count));
    Corpus validation(shuffled.begin() + static_cast<std::ptrdiff_t>(train_count), shuffled.end());

    ReleaseManifest manifest;
    manifest.train_path = (fs::path(out_dir) / "train.jsonl").string();
    manifest.validation_path = (fs::path(out_dir) / "validation.jsonl").string();
    write_corpus(train, manifest.train_path);
    write_corpus(validation, manifest.validation_path);
    manifest.train_sha256 = sha256_file_hex(manifest.train_path);
    manifest.validation_sha256 = sha256_file_hex(manifest.validation_path);
    manifest.train_count = train.size();
    manifest.validation_count = validation.size();
    manifest.train_tokens = token_sum(train);
    manifest.validation_tokens = token_sum(validation);
    manifest.config_hash = options.config_hash;
    manifest.timestamp = resolve_timestamp();

    std::map<std::string, std::uint64_t> per_source;
    for (const Document& doc : shuffled) per_source[doc.source]++;
    for (const auto& [source, count] : per_source) {
        manifest.source_fractions[source] =
            static_cast<double>(count) / static_cast<double>(shuffled.size());
    }

    // sha256sum-compatible: "<hex>  <filename>".
    std::ofstream shasums(fs::path(out_dir) / "SHASUMS", std::ios::binary);
    if (!shasums) throw std::runtime_error("release: cannot write SHASUMS");
    shasums << manifest.train_sha256 << "  train.jsonl\n";
    shasums << manifest.validation_sha256 << "  validation.jsonl\n";

    write_manifest_json(manifest, (fs::path(out_dir) / "manifest.json").string());
    return manifest;
}

void write_manifest_json(const ReleaseManifest& manifest, const std::string& path) {
    // File names, not absolute paths: the release directory is relocatable
    // and reruns into different directories stay byte-identical.
    ordered_json doc;
    doc["train"] = {{"path", std::filesystem::path(manifest.train_path).filename().string()},
                    {"sha256", manifest.train_sha256},
                    {"documents", manifest.train_count},
                    {"approx_tokens", manifest.train_tokens}};
    doc["validation"] = {{"path", std::filesystem::path(manifest.validation_path).filename().string()},
                         {"sha256", manifest.validation_sha256},
                         {"documents", manifest.validation_count},
                         {"approx_tokens", manifest.validation_tokens}};
    ordered_json fractions = ordered_json::object();
    for (const auto& [source, fraction] : manifest.source_fractions)
        fractions[source] = fraction;
    doc["source_composition"] = std::move(fractions);
    doc["config_sha256"] = manifest.config_hash;
    if (!manifest.tokenizer_sha256.empty()) doc["tokenizer_sha256"] = manifest.tokenizer_sha256;
    doc["timestamp"] = manifest.timestamp;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("release: cannot write manifest " + path);
    out << doc.dump(2) << '\n';
}

} // namespace winnow
