// winnow: deterministic corpus-curation pipeline and measurement tools.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 runtime failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "winnow/config.hpp"
#include "winnow/corpus_io.hpp"
#include "winnow/exact_dedup.hpp"
#include "winnow/lid.hpp"
#include "winnow/near_dedup.hpp"
#include "winnow/normalize.hpp"
#include "winnow/pipeline.hpp"
#include "winnow/quality.hpp"
#include "winnow/release.hpp"
#include "winnow/sha256.hpp"
#include "winnow/tokenizer.hpp"

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace winnow;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitFailure = 3;

void write_json_file(const ordered_json& doc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << doc.dump(2) << '\n';
}

Corpus read_input(const std::string& path, const std::string& format_flag,
                  const std::string& source) {
    CorpusFormat format =
        format_flag.empty() ? infer_format(path) : parse_format(format_flag);
    return read_corpus(path, format, source);
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

ordered_json counts_json(const std::map<std::string, std::uint64_t>& counts) {
    ordered_json obj = ordered_json::object();
    for (const auto& [k, v] : counts) obj[k] = v;
    return obj;
}

int cmd_dedup_exact(const std::string& in, const std::string& out, const std::string& report,
                    const std::string& format, unsigned workers) {
    auto [kept, stats] = dedup_exact(read_input(in, format, ""), workers);
    write_corpus(kept, out);
    if (!report.empty()) {
        ordered_json doc;
        doc["input_count"] = stats.input_count;
        doc["kept_count"] = stats.kept_count;
        doc["per_source_input"] = counts_json(stats.per_source_input);
        doc["per_source_dropped"] = counts_json(stats.per_source_dropped);
        ordered_json rates = ordered_json::object();
        for (const auto& [source, _] : stats.per_source_input)
            rates[source] = stats.per_source_dup_rate(source);
        doc["per_source_dup_rate"] = std::move(rates);
        write_json_file(doc, report);
    }
    std::cerr << "dedup-exact: " << stats.input_count << " -> " << stats.kept_count << "\n";
    return kExitOk;
}

int cmd_normalize(const std::string& in, const std::string& out, const std::string& report,
                  std::size_t min_words, const std::string& format, unsigned workers) {
    auto [kept, stats] = phase2_normalize(read_input(in, format, ""), min_words, workers);
    write_corpus(kept, out);
    if (!report.empty()) {
        ordered_json doc;
        doc["input_count"] = stats.input_count;
        doc["kept_count"] = stats.kept_count;
        doc["short_dropped"] = stats.short_dropped;
        doc["mojibake_fixed"] = stats.mojibake_fixed;
        doc["mojibake_fixed_rate"] = stats.mojibake_fixed_rate();
        doc["min_words"] = min_words;
        write_json_file(doc, report);
    }
    std::cerr << "normalize: " << stats.input_count << " -> " << stats.kept_count << " ("
              << stats.mojibake_fixed << " mojibake-fixed)\n";
    return kExitOk;
}

int cmd_lid_train(const std::vector<std::string>& seed_specs, const std::string& out) {
    std::map<std::string, std::vector<std::string>> seeds;
    for (const std::string& spec : seed_specs) {
        std::size_t eq = spec.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--seeds expects label=path, got \"" + spec + "\"");
        std::string label = spec.substr(0, eq);
        std::string path = spec.substr(eq + 1);
        Corpus corpus = read_corpus(path, infer_format(path), label);
        auto& texts = seeds[label];
        for (Document& doc : corpus) texts.push_back(std::move(doc.text));
    }
    LidModel model = LidModel::train(seeds);
    model.set_provenance("winnow lid-train");
    model.save(out);
    std::cerr << "lid-train: " << seeds.size() << " classes -> " << out << "\n";
    return kExitOk;
}

int cmd_lid_filter(const std::string& in, const std::string& out, const std::string& model_path,
                   const std::string& target, double threshold, const std::string& report,
                   const std::string& format, unsigned workers) {
    LidModel model = LidModel::load(model_path);
    LidAdapter adapter = make_builtin_adapter(model);
    auto [kept, stats] = filter_lid(read_input(in, format, ""), adapter, target, threshold, workers);
    write_corpus(kept, out);
    if (!report.empty()) {
        ordered_json doc;
        doc["input_count"] = stats.input_count;
        doc["kept_count"] = stats.kept_count;
        doc["target"] = target;
        doc["threshold"] = threshold;
        doc["drops_by_predicted"] = counts_json(stats.drops_by_predicted);
        write_json_file(doc, report);
    }
    std::cerr << "lid-filter: " << stats.input_count << " -> " << stats.kept_count << "\n";
    return kExitOk;
}

ordered_json bench_report_json(const LidBenchReport& report) {
    ordered_json doc;
    doc["adapter"] = report.adapter;
    doc["accuracy"] = report.accuracy;
    doc["docs_per_sec"] = report.docs_per_sec;
    doc["labels"] = report.labels;
    doc["confusion"] = report.confusion;
    ordered_json per_class = ordered_json::object();
    for (const auto& [label, m] : report.per_class) {
        ordered_json entry;
        entry["precision"] = m.precision;
        entry["recall"] = m.recall;
        entry["f1"] = m.f1;
        entry["support"] = m.support;
        entry["f1_ci"] = {m.f1_ci_lo, m.f1_ci_hi};
        entry["formatted"] = format_f1_ci(m);
        per_class[label] = std::move(entry);
    }
    doc["per_class"] = std::move(per_class);
    return doc;
}

int cmd_lid_bench(const std::string& testset_path, const std::string& adapters_flag,
                  const std::string& model_path, std::size_t resamples, std::uint64_t seed,
                  const std::string& report_path) {
    auto testset = read_labeled_jsonl(testset_path);

    std::vector<LidAdapter> adapters;
    LidModel model; // must outlive the builtin adapter
    std::stringstream ss(adapters_flag);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "builtin") {
            if (model_path.empty())
                throw ConfigError("adapter \"builtin\" requires --model");
            model = LidModel::load(model_path);
            adapters.push_back(make_builtin_adapter(model));
        } else if (item.rfind("command:", 0) == 0) {
            adapters.push_back(make_command_adapter(item.substr(8)));
        } else if (!item.empty()) {
            throw ConfigError("unknown adapter \"" + item + "\"");
        }
    }
    if (adapters.empty()) throw ConfigError("no adapters selected");

    ordered_json all = ordered_json::array();
    for (const LidAdapter& adapter : adapters) {
        LidBenchReport report = bench_lid(adapter, testset, resamples, seed);
        all.push_back(bench_report_json(report));
        std::printf("%s: accuracy %.3f, %.0f docs/sec\n", report.adapter.c_str(),
                    report.accuracy, report.docs_per_sec);
        for (const std::string& label : report.labels) {
            std::printf("  %-12s F1 %s\n", label.c_str(),
                        format_f1_ci(report.per_class.at(label)).c_str());
        }
    }
    if (!report_path.empty()) write_json_file(all, report_path);
    return kExitOk;
}

int cmd_dedup_near(const std::string& in, const std::string& out, double tau, std::size_t k,
                   std::size_t bands, std::size_t rows, std::uint64_t seed,
                   const std::string& report, const std::string& format, unsigned workers) {
    NearDedupParams params;
    params.tau = tau;
    params.k = k;
    params.bands = bands;
    params.rows = rows;
    params.seed = seed;
    auto [kept, stats] = dedup_near(read_input(in, format, ""), params, workers);
    write_corpus(kept, out);
    if (!report.empty()) {
        ordered_json doc;
        doc["input_count"] = stats.input_count;
        doc["kept_count"] = stats.kept_count;
        doc["removed_count"] = stats.removed_count;
        doc["clusters"] = stats.cluster_count;
        doc["docs_covered"] = stats.docs_covered;
        doc["candidate_pairs"] = stats.candidate_pairs;
        doc["verified_pairs"] = stats.verified_pairs;
        doc["tau"] = tau;
        write_json_file(doc, report);
    }
    std::cerr << "dedup-near: " << stats.input_count << " -> " << stats.kept_count << " ("
              << stats.cluster_count << " clusters)\n";
    return kExitOk;
}

int cmd_scurve(std::size_t bands, std::size_t rows, const std::string& points,
               const std::string& out_path) {
    double lo = 0.0, hi = 1.0, step = 0.01;
    if (!points.empty()) {
        if (std::sscanf(points.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
            throw ConfigError("--points expects start:end:step, got \"" + points + "\"");
    }
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write " + out_path);
        out = &file;
    }
    (*out) << "s,p_candidate\n";
    char buf[64];
    for (double s = lo; s <= hi + 1e-12; s += step) {
        std::snprintf(buf, sizeof(buf), "%.4f,%.6f\n", s, s_curve(s, bands, rows));
        (*out) << buf;
    }
    std::fprintf(stderr, "s* = (1/%zu)^(1/%zu) = %.6f\n", bands, rows,
                 s_curve_threshold(bands, rows));
    return kExitOk;
}

int cmd_quality_filter(const std::string& in, const std::string& out,
                       const std::string& seed_corpus, std::size_t seed_min_words,
                       double drop_fraction, std::size_t ngram_order, const std::string& report,
                       const std::string& format, unsigned workers) {
    Corpus seed_docs = read_corpus(seed_corpus, infer_format(seed_corpus), "quality-seed");
    SeedNgramSet seed = build_seed(seed_docs, seed_min_words, ngram_order);
    auto [kept, stats] = quality_filter(read_input(in, format, ""), seed, drop_fraction, workers);
    write_corpus(kept, out);
    if (!report.empty()) {
        ordered_json doc;
        doc["input_count"] = stats.input_count;
        doc["kept_count"] = stats.kept_count;
        doc["dropped_count"] = stats.dropped_count;
        doc["threshold"] = stats.threshold;
        doc["seed_ngrams"] = seed.size();
        doc["per_source_input"] = counts_json(stats.per_source_input);
        doc["per_source_dropped"] = counts_json(stats.per_source_dropped);
        doc["histogram"] = stats.histogram;
        write_json_file(doc, report);
    }
    std::cerr << "quality-filter: " << stats.input_count << " -> " << stats.kept_count
              << " (threshold " << stats.threshold << ")\n";
    return kExitOk;
}

int cmd_release(const std::string& in, const std::string& out_dir, double split,
                std::uint64_t seed, const std::string& format) {
    ReleaseOptions options;
    options.split_fraction = split;
    options.seed = seed;
    ReleaseManifest manifest = split_release(read_input(in, format, ""), out_dir, options);
    std::cerr << "release: " << manifest.train_count << " train / " << manifest.validation_count
              << " validation -> " << out_dir << "\n";
    return kExitOk;
}

int cmd_train_tokenizer(const std::string& in, std::size_t vocab, const std::string& out,
                        std::uint64_t seed, const std::string& format) {
    Corpus corpus = read_input(in, format, "");
    Tokenizer tokenizer = Tokenizer::train(corpus, vocab, seed);
    tokenizer.save(out);
    std::cerr << "train-tokenizer: vocab " << tokenizer.vocab_size() << " ("
              << tokenizer.merges().size() << " merges) -> " << out << " sha256 "
              << sha256_file_hex(out) << "\n";
    return kExitOk;
}

int cmd_eval_fertility(const std::string& model_path, const std::string& eval_path,
                       const std::string& compare_path, const std::string& baseline,
                       const std::string& report_path) {
    std::vector<std::string> sentences = read_lines(eval_path);

    std::vector<TokenCounts> rows;
    rows.push_back(whitespace_baseline_counts(sentences));
    if (!model_path.empty()) {
        Tokenizer tokenizer = Tokenizer::load(model_path);
        rows.push_back(count_tokens(tokenizer, "model", sentences));
    }
    if (!compare_path.empty()) {
        std::ifstream in(compare_path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + compare_path);
        ordered_json doc = ordered_json::parse(in);
        for (const auto& [name, entry] : doc.items()) {
            TokenCounts counts;
            counts.name = name;
            if (entry.contains("tokens_per_sentence")) {
                counts.tokens_per_sentence =
                    entry["tokens_per_sentence"].get<std::vector<std::uint64_t>>();
                for (std::uint64_t n : counts.tokens_per_sentence) counts.total_tokens += n;
            } else if (entry.contains("total_tokens")) {
                counts.total_tokens = entry["total_tokens"].get<std::uint64_t>();
            } else {
                throw ConfigError("compare row \"" + name +
                                  "\" needs tokens_per_sentence or total_tokens");
            }
            rows.push_back(std::move(counts));
        }
    }

    std::string base = baseline;
    if (base.empty()) base = model_path.empty() ? rows.front().name : "model";
    FertilityReport report = fertility_report(sentences, rows, base);

    std::printf("| Tokenizer | Tokens | Words | Fertility (micro) | Fertility (macro) | Savings vs %s |\n",
                report.baseline.c_str());
    std::printf("|---|---:|---:|---:|---:|---:|\n");
    ordered_json json_rows = ordered_json::array();
    for (const FertilityRow& row : report.rows) {
        char macro[32];
        if (row.has_macro)
            std::snprintf(macro, sizeof(macro), "%.3f", row.macro_fertility);
        else
            std::snprintf(macro, sizeof(macro), "n/a");
        std::printf("| %s | %llu | %llu | %.3f | %s | %.1f%% |\n", row.name.c_str(),
                    static_cast<unsigned long long>(row.total_tokens),
                    static_cast<unsigned long long>(row.total_words), row.micro_fertility, macro,
                    row.savings_vs_baseline * 100.0);
        ordered_json entry;
        entry["name"] = row.name;
        entry["total_tokens"] = row.total_tokens;
        entry["total_words"] = row.total_words;
        entry["micro_fertility"] = row.micro_fertility;
        if (row.has_macro) entry["macro_fertility"] = row.macro_fertility;
        entry["savings_vs_baseline"] = row.savings_vs_baseline;
        json_rows.push_back(std::move(entry));
    }
    if (!report_path.empty()) {
        ordered_json doc;
        doc["sentences"] = report.sentence_count;
        doc["skipped_empty"] = report.skipped_empty;
        doc["baseline"] = report.baseline;
        doc["rows"] = std::move(json_rows);
        write_json_file(doc, report_path);
    }
    return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            double quality_min_threshold, unsigned workers) {
    PipelineConfig config;
    try {
        config = load_config(config_path);
        if (quality_min_threshold >= 0.0) {
            config.quality_min_threshold = quality_min_threshold;
            config.validate();
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    PipelineResult result = run_pipeline(config, out_dir, workers);
    std::cout << retention_to_markdown(result.retention);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"winnow: deterministic corpus curation pipeline"};
    app.require_subcommand(1);

    unsigned workers = 0;
    app.add_option("--workers", workers,
                   "worker threads (default: WINNOW_WORKERS env or hardware)");

    std::string in, out, report, format, model, target, testset, adapters, points, seed_corpus;
    std::string config_path, out_dir, eval_path, compare_path, baseline;
    std::vector<std::string> seed_specs;
    std::size_t min_words = 50, k = 64, bands = 16, rows = 4, vocab = 16384;
    std::size_t seed_min_words = 200, ngram_order = 5, resamples = 500;
    double threshold = 0.5, tau = 0.80, drop_fraction = 0.15, split = 0.95;
    std::uint64_t seed = 0;

    double quality_min_threshold = -1.0;
    auto* run = app.add_subcommand("run", "run the full pipeline from a YAML config");
    run->add_option("--config", config_path, "pipeline YAML")->required();
    run->add_option("--out-dir", out_dir, "output directory")->required();
    run->add_option("--quality-min-threshold", quality_min_threshold,
                    "absolute phase-5 coverage floor instead of the percentile drop");

    auto* de = app.add_subcommand("dedup-exact", "phase 1: byte-exact dedup");
    de->add_option("--in", in)->required();
    de->add_option("--out", out)->required();
    de->add_option("--report", report);
    de->add_option("--format", format);

    auto* norm = app.add_subcommand("normalize", "phase 2: repair, NFC, collapse, length floor");
    norm->add_option("--in", in)->required();
    norm->add_option("--out", out)->required();
    norm->add_option("--report", report);
    norm->add_option("--min-words", min_words);
    norm->add_option("--format", format);

    auto* lt = app.add_subcommand("lid-train", "train the built-in character-n-gram classifier");
    lt->add_option("--seeds", seed_specs, "label=path (repeatable)")->required();
    lt->add_option("--out", out)->required();

    auto* lf = app.add_subcommand("lid-filter", "phase 3: language verification");
    lf->add_option("--in", in)->required();
    lf->add_option("--out", out)->required();
    lf->add_option("--model", model)->required();
    lf->add_option("--target", target)->required();
    lf->add_option("--threshold", threshold);
    lf->add_option("--report", report);
    lf->add_option("--format", format);

    auto* lb = app.add_subcommand("lid-bench", "benchmark classifiers on a labeled test set");
    lb->add_option("--testset", testset)->required();
    lb->add_option("--adapters", adapters, "builtin[,command:<exe>]...")->required();
    lb->add_option("--model", model, "model file for the builtin adapter");
    lb->add_option("--resamples", resamples);
    lb->add_option("--seed", seed);
    lb->add_option("--report", report);

    auto* dn = app.add_subcommand("dedup-near", "phase 4: MinHash/LSH near-dedup");
    dn->add_option("--in", in)->required();
    dn->add_option("--out", out)->required();
    dn->add_option("--tau", tau);
    dn->add_option("--k", k);
    dn->add_option("--bands", bands);
    dn->add_option("--rows", rows);
    dn->add_option("--seed", seed);
    dn->add_option("--report", report);
    dn->add_option("--format", format);

    auto* sc = app.add_subcommand("scurve", "emit the LSH capture-probability curve as CSV");
    sc->add_option("--b", bands);
    sc->add_option("--r", rows);
    sc->add_option("--points", points, "start:end:step (default 0.0:1.0:0.01)");
    sc->add_option("--out", out);

    auto* qf = app.add_subcommand("quality-filter", "phase 5: seed-coverage percentile filter");
    qf->add_option("--in", in)->required();
    qf->add_option("--out", out)->required();
    qf->add_option("--seed-corpus", seed_corpus)->required();
    qf->add_option("--seed-min-words", seed_min_words);
    qf->add_option("--drop-fraction", drop_fraction);
    qf->add_option("--ngram-order", ngram_order);
    qf->add_option("--report", report);
    qf->add_option("--format", format);

    auto* rel = app.add_subcommand("release", "phase 6: shuffle, split, hash manifest");
    rel->add_option("--in", in)->required();
    rel->add_option("--out-dir", out_dir)->required();
    rel->add_option("--split", split);
    rel->add_option("--seed", seed);
    rel->add_option("--format", format);

    auto* tt = app.add_subcommand("train-tokenizer", "train the byte-level BPE tokenizer");
    tt->add_option("--in", in)->required();
    tt->add_option("--vocab", vocab);
    tt->add_option("--out", out)->required();
    tt->add_option("--seed", seed);
    tt->add_option("--format", format);

    auto* ef = app.add_subcommand("eval-fertility", "tokens-per-word comparison report");
    ef->add_option("--model", model);
    ef->add_option("--eval", eval_path, "plain text, one sentence per line")->required();
    ef->add_option("--compare", compare_path, "external token-count JSON");
    ef->add_option("--baseline", baseline, "row name used for savings (default: model)");
    ef->add_option("--report", report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, quality_min_threshold, workers);
        if (de->parsed()) return cmd_dedup_exact(in, out, report, format, workers);
        if (norm->parsed()) return cmd_normalize(in, out, report, min_words, format, workers);
        if (lt->parsed()) return cmd_lid_train(seed_specs, out);
        if (lf->parsed())
            return cmd_lid_filter(in, out, model, target, threshold, report, format, workers);
        if (lb->parsed()) return cmd_lid_bench(testset, adapters, model, resamples, seed, report);
        if (dn->parsed())
            return cmd_dedup_near(in, out, tau, k, bands, rows, seed, report, format, workers);
        if (sc->parsed()) return cmd_scurve(bands, rows, points, out);
        if (qf->parsed())
            return cmd_quality_filter(in, out, seed_corpus, seed_min_words, drop_fraction,
                                      ngram_order, report, format, workers);
        if (rel->parsed()) return cmd_release(in, out_dir, split, seed, format);
        if (tt->parsed()) return cmd_train_tokenizer(in, vocab, out, seed, format);
        if (ef->parsed())
            return cmd_eval_fertility(model, eval_path, compare_path, baseline, report);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitConfig;
}
