#include "winnow/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include <json.hpp>

#include "winnow/corpus_io.hpp"
#include "winnow/exact_dedup.hpp"
#include "winnow/lid.hpp"
#include "winnow/near_dedup.hpp"
#include "winnow/normalize.hpp"
#include "winnow/quality.hpp"
#include "winnow/release.hpp"
#include "winnow/sha256.hpp"
#include "winnow/tokenizer.hpp"

namespace winnow {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

struct PhaseFailure : std::runtime_error {
    PhaseFailure(const std::string& phase, const std::string& cause)
        : std::runtime_error("phase \"" + phase + "\" failed: " + cause) {}
};

void write_json(const ordered_json& doc, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

void write_text(const std::string& text, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::map<std::string, std::uint64_t> count_by_source(const Corpus& corpus) {
    std::map<std::string, std::uint64_t> counts;
    for (const Document& doc : corpus) counts[doc.source]++;
    return counts;
}

ordered_json source_counts_json(const std::map<std::string, std::uint64_t>& counts) {
    ordered_json obj = ordered_json::object();
    for (const auto& [k, v] : counts) obj[k] = v;
    return obj;
}

std::string fmt_pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
    return buf;
}

} // namespace

std::string retention_to_markdown(const RetentionReport& report) {
    std::string md;
    md += "| Stage | Documents | Retention | Drop |\n";
    md += "|---|---:|---:|---:|\n";
    md += "| raw union | " + std::to_string(report.raw_count) + " | 100.00% | - |\n";
    for (const PhaseRow& row : report.rows) {
        md += "| " + row.phase + " | " + std::to_string(row.docs_out) + " | " +
              fmt_pct(row.retention_vs_raw) + " | " + fmt_pct(row.drop_vs_previous) + " |\n";
    }
    return md;
}

PipelineResult run_pipeline(const PipelineConfig& config, const std::string& out_dir,
                            unsigned workers) {
    config.validate();
    fs::create_directories(out_dir);
    fs::path reports_dir = fs::path(out_dir) / "reports";
    fs::create_directories(reports_dir);

    RetentionReport retention;
    std::vector<std::pair<std::string, double>> timings;

    auto run_phase = [&](const std::string& name, std::uint64_t docs_in, auto&& body) {
        auto t0 = Clock::now();
        std::uint64_t docs_out;
        try {
            docs_out = body();
        } catch (const std::exception& e) {
            throw PhaseFailure(name, e.what());
        }
        double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
        timings.emplace_back(name, elapsed);
        PhaseRow row;
        row.phase = name;
        row.docs_in = docs_in;
        row.docs_out = docs_out;
        row.retention_vs_raw = retention.raw_count == 0
                                   ? 0.0
                                   : static_cast<double>(docs_out) /
                                         static_cast<double>(retention.raw_count);
        row.drop_vs_previous =
            docs_in == 0 ? 0.0
                         : 1.0 - static_cast<double>(docs_out) / static_cast<double>(docs_in);
        row.elapsed_seconds = elapsed;
        retention.rows.push_back(row);
        return docs_out;
    };

    auto record_funnel = [&](const Corpus& corpus) {
        auto counts = count_by_source(corpus);
        for (auto& [source, column] : retention.per_source_funnel) {
            auto it = counts.find(source);
            column.push_back(it == counts.end() ? 0 : it->second);
        }
    };

    // Aggregation: sources in configured order, one file each.
    Corpus corpus;
    try {
        for (std::size_t s = 0; s < config.sources.size(); ++s) {
            const SourceSpec& spec = config.sources[s];
            Corpus part = read_corpus(spec.path, spec.format, spec.name,
                                      static_cast<std::uint32_t>(s));
            corpus.insert(corpus.end(), std::make_move_iterator(part.begin()),
                          std::make_move_iterator(part.end()));
        }
    } catch (const std::exception& e) {
        throw PhaseFailure("aggregate", e.what());
    }
    retention.raw_count = corpus.size();
    for (const auto& [source, count] : count_by_source(corpus))
        retention.per_source_funnel[source] = {count};

    // Phase 1: byte-exact dedup.
    DedupStats dedup_stats;
    run_phase("phase1 exact-dedup", corpus.size(), [&] {
        auto [kept, stats] = dedup_exact(corpus, workers);
        corpus = std::move(kept);
        dedup_stats = std::move(stats);
        return corpus.size();
    });
    record_funnel(corpus);
    write_corpus(corpus, (fs::path(out_dir) / "phase1_exact_dedup.jsonl").string());
    {
        ordered_json report;
        report["input_count"] = dedup_stats.input_count;
        report["kept_count"] = dedup_stats.kept_count;
        report["per_source_input"] = source_counts_json(dedup_stats.per_source_input);
        report["per_source_dropped"] = source_counts_json(dedup_stats.per_source_dropped);
        ordered_json rates = ordered_json::object();
        for (const auto& [source, _] : dedup_stats.per_source_input)
            rates[source] = dedup_stats.per_source_dup_rate(source);
        report["per_source_dup_rate"] = std::move(rates);
        write_json(report, reports_dir / "phase1_exact_dedup.json");
    }

    // Phase 2: repair + NFC + collapse + length floor.
    NormalizeStats norm_stats;
    run_phase("phase2 normalize", corpus.size(), [&] {
        auto [kept, stats] = phase2_normalize(corpus, config.min_words, workers);
        corpus = std::move(kept);
        norm_stats = stats;
        return corpus.size();
    });
    record_funnel(corpus);
    write_corpus(corpus, (fs::path(out_dir) / "phase2_normalize.jsonl").string());
    {
        ordered_json report;
        report["input_count"] = norm_stats.input_count;
        report["kept_count"] = norm_stats.kept_count;
        report["short_dropped"] = norm_stats.short_dropped;
        report["mojibake_fixed"] = norm_stats.mojibake_fixed;
        report["mojibake_fixed_rate"] = norm_stats.mojibake_fixed_rate();
        report["min_words"] = config.min_words;
        write_json(report, reports_dir / "phase2_normalize.json");
    }

    // Phase 3: language verification.
    LidFilterStats lid_stats;
    run_phase("phase3 lid-filter", corpus.size(), [&] {
        LidModel model;
        if (!config.lid_model.empty()) {
            model = LidModel::load(config.lid_model);
        } else {
            std::map<std::string, std::vector<std::string>> seeds;
            for (const auto& [label, path] : config.lid_seeds) {
                Corpus seed_corpus = read_corpus(path, infer_format(path), label);
                auto& texts = seeds[label];
                texts.reserve(seed_corpus.size());
                for (Document& doc : seed_corpus) texts.push_back(std::move(doc.text));
            }
            model = LidModel::train(seeds);
        }
        LidAdapter adapter = make_builtin_adapter(model);
        auto [kept, stats] =
            filter_lid(corpus, adapter, config.target_language, config.lid_threshold, workers);
        corpus = std::move(kept);
        lid_stats = std::move(stats);
        return corpus.size();
    });
    record_funnel(corpus);
    write_corpus(corpus, (fs::path(out_dir) / "phase3_lid.jsonl").string());
    {
        ordered_json report;
        report["input_count"] = lid_stats.input_count;
        report["kept_count"] = lid_stats.kept_count;
        report["target"] = config.target_language;
        report["threshold"] = config.lid_threshold;
        report["drops_by_predicted"] = source_counts_json(lid_stats.drops_by_predicted);
        write_json(report, reports_dir / "phase3_lid.json");
    }

    // Phase 4: MinHash near-dedup.
    NearDedupReport near_report;
    run_phase("phase4 near-dedup", corpus.size(), [&] {
        NearDedupParams params;
        params.tau = config.jaccard_tau;
        params.k = config.minhash_k;
        params.bands = config.lsh_bands;
        params.rows = config.lsh_rows;
        params.seed = config.seed;
        auto [kept, report] = dedup_near(corpus, params, workers);
        corpus = std::move(kept);
        near_report = report;
        return corpus.size();
    });
    record_funnel(corpus);
    write_corpus(corpus, (fs::path(out_dir) / "phase4_near_dedup.jsonl").string());
    {
        ordered_json report;
        report["input_count"] = near_report.input_count;
        report["kept_count"] = near_report.kept_count;
        report["removed_count"] = near_report.removed_count;
        report["clusters"] = near_report.cluster_count;
        report["docs_covered"] = near_report.docs_covered;
        report["candidate_pairs"] = near_report.candidate_pairs;
        report["verified_pairs"] = near_report.verified_pairs;
        report["tau"] = config.jaccard_tau;
        write_json(report, reports_dir / "phase4_near_dedup.json");
    }

    // Phase 5: character-n-gram coverage filter.
    QualityReport quality_report;
    run_phase("phase5 quality-filter", corpus.size(), [&] {
        Corpus seed_docs;
        if (!config.quality_seed_path.empty()) {
            seed_docs = read_corpus(config.quality_seed_path,
                                    infer_format(config.quality_seed_path), "quality-seed");
        } else {
            for (std::size_t s = 0; s < config.sources.size(); ++s) {
                if (config.sources[s].name == config.quality_seed_source) {
                    seed_docs = read_corpus(config.sources[s].path, config.sources[s].format,
                                            config.sources[s].name,
                                            static_cast<std::uint32_t>(s));
                }
            }
        }
        SeedNgramSet seed = build_seed(seed_docs, config.seed_min_words, config.ngram_order);
        auto [kept, report] =
            config.quality_min_threshold >= 0.0
                ? quality_filter_absolute(corpus, seed, config.quality_min_threshold, workers)
                : quality_filter(corpus, seed, config.quality_drop_fraction, workers);
        corpus = std::move(kept);
        quality_report = std::move(report);
        return corpus.size();
    });
    record_funnel(corpus);
    write_corpus(corpus, (fs::path(out_dir) / "phase5_quality.jsonl").string());
    {
        ordered_json report;
        report["input_count"] = quality_report.input_count;
        report["kept_count"] = quality_report.kept_count;
        report["dropped_count"] = quality_report.dropped_count;
        report["threshold"] = quality_report.threshold;
        report["per_source_input"] = source_counts_json(quality_report.per_source_input);
        report["per_source_dropped"] = source_counts_json(quality_report.per_source_dropped);
        report["histogram"] = quality_report.histogram;
        write_json(report, reports_dir / "phase5_quality.json");
    }

    // Phase 6: shuffle, split, manifest, tokenizer.
    fs::path release_dir = fs::path(out_dir) / "release";
    run_phase("phase6 release", corpus.size(), [&] {
        ReleaseOptions options;
        options.split_fraction = config.split_fraction;
        options.seed = config.seed;
        options.config_hash = config.config_hash;
        ReleaseManifest manifest = split_release(corpus, release_dir.string(), options);

        Corpus train = read_corpus(manifest.train_path, CorpusFormat::jsonl);
        Tokenizer tokenizer = Tokenizer::train(train, config.vocab_size, config.seed);
        std::string tokenizer_path = (fs::path(out_dir) / "tokenizer.json").string();
        tokenizer.save(tokenizer_path);
        manifest.tokenizer_sha256 = sha256_file_hex(tokenizer_path);
        write_manifest_json(manifest, (release_dir / "manifest.json").string());
        return corpus.size();
    });
    record_funnel(corpus);

    // Retention report: JSON + markdown, then wall-clock timings separately
    // (they vary run to run and are excluded from the determinism contract).
    {
        ordered_json report;
        report["raw_count"] = retention.raw_count;
        ordered_json rows = ordered_json::array();
        for (const PhaseRow& row : retention.rows) {
            ordered_json entry;
            entry["phase"] = row.phase;
            entry["docs_in"] = row.docs_in;
            entry["docs_out"] = row.docs_out;
            entry["retention_vs_raw"] = row.retention_vs_raw;
            entry["drop_vs_previous"] = row.drop_vs_previous;
            rows.push_back(std::move(entry));
        }
        report["phases"] = std::move(rows);
        ordered_json funnel = ordered_json::object();
        for (const auto& [source, column] : retention.per_source_funnel)
            funnel[source] = column;
        report["per_source_funnel"] = std::move(funnel);
        write_json(report, reports_dir / "retention.json");
        write_text(retention_to_markdown(retention), reports_dir / "retention.md");

        ordered_json timing_doc = ordered_json::object();
        for (const auto& [phase, seconds] : timings) timing_doc[phase] = seconds;
        write_json(timing_doc, reports_dir / "timings.json");
    }

    PipelineResult result;
    result.retention = std::move(retention);
    result.out_dir = out_dir;
    result.final_count = corpus.size();
    return result;
}

} // namespace winnow
