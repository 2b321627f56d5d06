#include "winnow/lid.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include <json.hpp>

#include "winnow/corpus_io.hpp"
#include "winnow/parallel.hpp"
#include "winnow/rng.hpp"
#include "winnow/unicode.hpp"

namespace winnow {

namespace {

using ordered_json = nlohmann::ordered_json;

template <typename Fn>
void for_each_gram(const std::u32string& cps, std::size_t order, Fn&& fn) {
    if (cps.size() < order) return;
    std::string gram;
    for (std::size_t i = 0; i + order <= cps.size(); ++i) {
        gram.clear();
        for (std::size_t k = 0; k < order; ++k) uni::append_utf8(gram, cps[i + k]);
        fn(gram);
    }
}

std::string format_prob(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", p);
    return buf;
}

double percentile_interpolated(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    double pos = q * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

// F1 with the degenerate cases pinned: TP=0 with any FP or FN -> 0, and the
// 0/0 case (class absent from both truth and predictions) -> 0.
double f1_from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
    if (tp == 0) return 0.0;
    double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return 2.0 * precision * recall / (precision + recall);
}

} // namespace

LidModel LidModel::train(const std::map<std::string, std::vector<std::string>>& labeled_corpora) {
    if (labeled_corpora.size() < 2)
        throw std::runtime_error("lid: training needs at least two classes, got " +
                                 std::to_string(labeled_corpora.size()));
    for (const auto& [label, docs] : labeled_corpora) {
        if (docs.empty()) throw std::runtime_error("lid: class \"" + label + "\" has no documents");
    }

    LidModel model;
    std::uint64_t total_docs = 0;
    std::vector<std::set<std::string>> vocab(kMaxOrder);
    for (const auto& [label, docs] : labeled_corpora) {
        model.classes_.push_back(label);
        ClassStats cs;
        cs.doc_count = docs.size();
        cs.gram_counts.resize(kMaxOrder);
        cs.gram_totals.assign(kMaxOrder, 0);
        for (const std::string& text : docs) {
            auto cps = uni::decode_utf8(text);
            if (!cps) throw std::runtime_error("lid: training document is not valid UTF-8");
            for (std::size_t order = 1; order <= kMaxOrder; ++order) {
                for_each_gram(*cps, order, [&](const std::string& gram) {
                    cs.gram_counts[order - 1][gram]++;
                    cs.gram_totals[order - 1]++;
                    vocab[order - 1].insert(gram);
                });
            }
        }
        total_docs += cs.doc_count;
        model.stats_.push_back(std::move(cs));
    }
    for (std::size_t i = 0; i < model.classes_.size(); ++i) {
        model.stats_[i].log_prior = std::log(static_cast<double>(model.stats_[i].doc_count) /
                                             static_cast<double>(total_docs));
    }
    model.vocab_sizes_.resize(kMaxOrder);
    for (std::size_t o = 0; o < kMaxOrder; ++o)
        model.vocab_sizes_[o] = vocab[o].size();
    model.provenance_ = "trained in-process";
    return model;
}

LabelDistribution LidModel::predict(const std::string& text) const {
    auto cps = uni::decode_utf8(text);
    std::vector<double> log_scores(classes_.size());
    for (std::size_t c = 0; c < classes_.size(); ++c) log_scores[c] = stats_[c].log_prior;

    if (cps) {
        for (std::size_t order = 1; order <= kMaxOrder; ++order) {
            for_each_gram(*cps, order, [&](const std::string& gram) {
                for (std::size_t c = 0; c < classes_.size(); ++c) {
                    const auto& counts = stats_[c].gram_counts[order - 1];
                    auto it = counts.find(gram);
                    std::uint64_t count = it == counts.end() ? 0 : it->second;
                    double denom = static_cast<double>(stats_[c].gram_totals[order - 1] +
                                                       vocab_sizes_[order - 1] + 1);
                    log_scores[c] += std::log(static_cast<double>(count + 1) / denom);
                }
            });
        }
    }

    double max_score = *std::max_element(log_scores.begin(), log_scores.end());
    double total = 0.0;
    for (double& s : log_scores) {
        s = std::exp(s - max_score);
        total += s;
    }
    LabelDistribution dist;
    for (std::size_t c = 0; c < classes_.size(); ++c) dist[classes_[c]] = log_scores[c] / total;
    return dist;
}

void LidModel::save(const std::string& path) const {
    ordered_json doc;
    doc["format"] = "winnow-lid";
    doc["version"] = 1;
    doc["provenance"] = provenance_;
    doc["classes"] = classes_;
    doc["vocab_sizes"] = vocab_sizes_;
    ordered_json stats = ordered_json::object();
    for (std::size_t c = 0; c < classes_.size(); ++c) {
        ordered_json entry;
        entry["doc_count"] = stats_[c].doc_count;
        ordered_json orders = ordered_json::array();
        for (std::size_t o = 0; o < kMaxOrder; ++o) {
            ordered_json order_entry;
            order_entry["total"] = stats_[c].gram_totals[o];
            ordered_json grams = ordered_json::object();
            std::vector<std::pair<std::string, std::uint64_t>> sorted(
                stats_[c].gram_counts[o].begin(), stats_[c].gram_counts[o].end());
            std::sort(sorted.begin(), sorted.end());
            for (const auto& [gram, count] : sorted) grams[gram] = count;
            order_entry["grams"] = std::move(grams);
            orders.push_back(std::move(order_entry));
        }
        entry["orders"] = std::move(orders);
        stats[classes_[c]] = std::move(entry);
    }
    doc["stats"] = std::move(stats);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("lid: cannot write model to " + path);
    out << doc.dump() << '\n';
}

LidModel LidModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("lid: cannot open model " + path);
    ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("lid: malformed model file " + path + ": " + e.what());
    }
    if (!doc.contains("format") || doc["format"] != "winnow-lid")
        throw std::runtime_error("lid: " + path + " is not a winnow-lid model");

    LidModel model;
    model.provenance_ = doc.value("provenance", std::string());
    model.classes_ = doc["classes"].get<std::vector<std::string>>();
    model.vocab_sizes_ = doc["vocab_sizes"].get<std::vector<std::uint64_t>>();
    std::uint64_t total_docs = 0;
    for (const std::string& label : model.classes_) {
        const auto& entry = doc["stats"][label];
        ClassStats cs;
        cs.doc_count = entry["doc_count"].get<std::uint64_t>();
        total_docs += cs.doc_count;
        for (const auto& order_entry : entry["orders"]) {
            std::unordered_map<std::string, std::uint64_t> counts;
            for (const auto& [gram, count] : order_entry["grams"].items())
                counts[gram] = count.get<std::uint64_t>();
            cs.gram_counts.push_back(std::move(counts));
            cs.gram_totals.push_back(order_entry["total"].get<std::uint64_t>());
        }
        if (cs.gram_counts.size() != kMaxOrder)
            throw std::runtime_error("lid: model has wrong n-gram order count");
        model.stats_.push_back(std::move(cs));
    }
    for (auto& cs : model.stats_) {
        cs.log_prior =
            std::log(static_cast<double>(cs.doc_count) / static_cast<double>(total_docs));
    }
    return model;
}

LidAdapter make_builtin_adapter(const LidModel& model, std::string name) {
    LidAdapter adapter;
    adapter.name = std::move(name);
    adapter.predict = [&model](const std::string& text) { return model.predict(text); };
    return adapter;
}

LidAdapter make_command_adapter(const std::string& command) {
    LidAdapter adapter;
    adapter.name = "command:" + command;

    auto run_batch = [command](const std::vector<std::string>& texts) {
        namespace fs = std::filesystem;
        static std::atomic<std::uint64_t> counter{0};
        std::string tag = std::to_string(::getpid()) + "_" + std::to_string(counter.fetch_add(1));
        fs::path in_path = fs::temp_directory_path() / ("winnow_lid_in_" + tag);
        fs::path out_path = fs::temp_directory_path() / ("winnow_lid_out_" + tag);

        {
            std::ofstream out(in_path, std::ios::binary);
            for (std::string text : texts) {
                std::replace(text.begin(), text.end(), '\n', ' ');
                std::replace(text.begin(), text.end(), '\r', ' ');
                out << text << '\n';
            }
        }

        std::string shell = command + " < " + in_path.string() + " > " + out_path.string();
        int rc = std::system(shell.c_str());

        std::vector<LabelDistribution> results(texts.size(), LabelDistribution{{kErrorClass, 1.0}});
        if (rc == 0) {
            std::ifstream in(out_path, std::ios::binary);
            std::string line;
            std::size_t row = 0;
            while (row < texts.size() && std::getline(in, line)) {
                std::size_t tab = line.find('\t');
                if (tab != std::string::npos && tab > 0) {
                    std::string label = line.substr(0, tab);
                    try {
                        double prob = std::stod(line.substr(tab + 1));
                        results[row] = LabelDistribution{{label, prob}};
                    } catch (const std::exception&) {
                        // row stays flagged as error
                    }
                }
                ++row;
            }
        }
        std::error_code ec;
        fs::remove(in_path, ec);
        fs::remove(out_path, ec);
        return results;
    };

    adapter.predict_batch = run_batch;
    adapter.predict = [run_batch](const std::string& text) {
        return run_batch({text}).front();
    };
    return adapter;
}

std::pair<Corpus, LidFilterStats> filter_lid(const Corpus& input, const LidAdapter& adapter,
                                             const std::string& target, double threshold,
                                             unsigned workers) {
    struct Row {
        std::string top_label;
        double top_prob = 0.0;
        double target_prob = 0.0;
    };
    std::vector<Row> rows(input.size());
    parallel_chunks(input.size(), resolve_workers(workers), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            LabelDistribution dist = adapter.predict(input[i].text);
            Row row;
            for (const auto& [label, prob] : dist) {
                if (prob > row.top_prob) {
                    row.top_prob = prob;
                    row.top_label = label;
                }
                if (label == target) row.target_prob = prob;
            }
            rows[i] = std::move(row);
        }
    });

    LidFilterStats stats;
    stats.input_count = input.size();
    Corpus kept;
    kept.reserve(input.size());
    for (std::size_t i = 0; i < input.size(); ++i) {
        const Row& row = rows[i];
        if (row.top_label == target && row.target_prob >= threshold) {
            Document doc = input[i];
            doc.meta["lid_conf"] = format_prob(row.target_prob);
            kept.push_back(std::move(doc));
        } else {
            stats.drops_by_predicted[row.top_label.empty() ? kErrorClass : row.top_label]++;
        }
    }
    stats.kept_count = kept.size();
    return {std::move(kept), std::move(stats)};
}

LidBenchReport bench_lid(const LidAdapter& adapter, const std::vector<LabeledText>& testset,
                         std::size_t resamples, std::uint64_t seed) {
    if (testset.empty()) throw std::runtime_error("bench_lid: empty test set");

    // Predictions are computed once; the bootstrap resamples rows, not model
    // calls. Only this loop is timed.
    std::vector<std::string> predicted(testset.size());
    auto t0 = std::chrono::steady_clock::now();
    if (adapter.predict_batch) {
        std::vector<std::string> texts;
        texts.reserve(testset.size());
        for (const auto& row : testset) texts.push_back(row.text);
        auto dists = adapter.predict_batch(texts);
        for (std::size_t i = 0; i < testset.size(); ++i) {
            const auto& dist = dists[i];
            auto best = std::max_element(dist.begin(), dist.end(),
                                         [](const auto& a, const auto& b) { return a.second < b.second; });
            predicted[i] = best == dist.end() ? kErrorClass : best->first;
        }
    } else {
        for (std::size_t i = 0; i < testset.size(); ++i) {
            LabelDistribution dist;
            try {
                dist = adapter.predict(testset[i].text);
            } catch (const std::exception&) {
                predicted[i] = kErrorClass;
                continue;
            }
            auto best = std::max_element(dist.begin(), dist.end(),
                                         [](const auto& a, const auto& b) { return a.second < b.second; });
            predicted[i] = best == dist.end() ? kErrorClass : best->first;
        }
    }
    auto t1 = std::chrono::steady_clock::now();
    double seconds = std::chrono::duration<double>(t1 - t0).count();

    LidBenchReport report;
    report.adapter = adapter.name;
    report.docs_per_sec =
        seconds > 0.0 ? static_cast<double>(testset.size()) / seconds : 0.0;

    // Label order: sorted true/predicted labels, reserved error column last.
    std::set<std::string> label_set;
    for (const auto& row : testset) label_set.insert(row.label);
    bool has_error_col = false;
    for (const auto& p : predicted) {
        if (p == kErrorClass) {
            has_error_col = true;
        } else {
            label_set.insert(p);
        }
    }
    label_set.erase(kErrorClass);
    report.labels.assign(label_set.begin(), label_set.end());
    if (has_error_col) report.labels.push_back(kErrorClass);

    std::unordered_map<std::string, std::size_t> label_index;
    for (std::size_t i = 0; i < report.labels.size(); ++i) label_index[report.labels[i]] = i;

    const std::size_t L = report.labels.size();
    report.confusion.assign(L, std::vector<std::uint64_t>(L, 0));
    std::uint64_t correct = 0;
    for (std::size_t i = 0; i < testset.size(); ++i) {
        report.confusion[label_index[testset[i].label]][label_index[predicted[i]]]++;
        if (predicted[i] == testset[i].label) ++correct;
    }
    report.accuracy = static_cast<double>(correct) / static_cast<double>(testset.size());

    auto metrics_from = [&](const std::vector<std::size_t>& rows_in_sample,
                            const std::string& label) -> double {
        std::uint64_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i : rows_in_sample) {
            bool is_true = testset[i].label == label;
            bool is_pred = predicted[i] == label;
            if (is_true && is_pred) ++tp;
            else if (!is_true && is_pred) ++fp;
            else if (is_true && !is_pred) ++fn;
        }
        return f1_from_counts(tp, fp, fn);
    };

    std::vector<std::size_t> all_rows(testset.size());
    for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;

    for (const std::string& label : report.labels) {
        std::size_t li = label_index[label];
        std::uint64_t tp = report.confusion[li][li];
        std::uint64_t support = 0, predicted_total = 0;
        for (std::size_t c = 0; c < L; ++c) support += report.confusion[li][c];
        for (std::size_t r = 0; r < L; ++r) predicted_total += report.confusion[r][li];
        ClassMetrics m;
        m.support = support;
        m.precision = predicted_total == 0 ? 0.0
                                           : static_cast<double>(tp) /
                                                 static_cast<double>(predicted_total);
        m.recall = support == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(support);
        m.f1 = metrics_from(all_rows, label);
        report.per_class[label] = m;
    }

    // Whole-set percentile bootstrap, one derived seed per resample.
    std::map<std::string, std::vector<double>> f1_samples;
    for (const std::string& label : report.labels) f1_samples[label].reserve(resamples);
    std::vector<std::size_t> sample(testset.size());
    for (std::size_t t = 0; t < resamples; ++t) {
        SeededRng rng(derive_seed(seed, t));
        for (std::size_t i = 0; i < testset.size(); ++i)
            sample[i] = static_cast<std::size_t>(rng.next_below(testset.size()));
        for (const std::string& label : report.labels)
            f1_samples[label].push_back(metrics_from(sample, label));
    }
    for (const std::string& label : report.labels) {
        ClassMetrics& m = report.per_class[label];
        if (resamples == 0) {
            m.f1_ci_lo = m.f1_ci_hi = m.f1;
            continue;
        }
        std::vector<double>& samples = f1_samples[label];
        std::sort(samples.begin(), samples.end());
        m.f1_ci_lo = percentile_interpolated(samples, 0.025);
        m.f1_ci_hi = percentile_interpolated(samples, 0.975);
    }
    return report;
}

std::string format_f1_ci(const ClassMetrics& m) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f [%.3f, %.3f]", m.f1, m.f1_ci_lo, m.f1_ci_hi);
    return buf;
}

std::vector<LabeledText> read_labeled_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open test set: " + path);
    std::vector<LabeledText> rows;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json row;
        try {
            row = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(path + ": malformed JSON at line " + std::to_string(line_no) +
                                     ": " + e.what());
        }
        if (!row.contains("text") || !row.contains("label"))
            throw std::runtime_error(path + ": row needs text and label at line " +
                                     std::to_string(line_no));
        rows.push_back({row["text"].get<std::string>(), row["label"].get<std::string>()});
    }
    return rows;
}

} // namespace winnow
