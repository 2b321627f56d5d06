#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "winnow/document.hpp"

namespace winnow {

// Per-class probabilities, keyed by label. Always a full distribution.
using LabelDistribution = std::map<std::string, double>;

// Multinomial character-n-gram classifier (orders 1..4, add-one smoothing).
// Stands in for external language identifiers; anything matching the
// LidAdapter signature below can be filtered with or benchmarked instead.
class LidModel {
public:
    static constexpr std::size_t kMaxOrder = 4;

    // labeled_corpora: label -> training documents. Requires >= 2 classes,
    // each nonempty. Deterministic for a fixed input.
    static LidModel train(const std::map<std::string, std::vector<std::string>>& labeled_corpora);

    // Probabilities >= 0 summing to 1 (within 1e-9). Text with no extractable
    // features (empty string) yields the prior distribution.
    LabelDistribution predict(const std::string& text) const;

    const std::vector<std::string>& classes() const { return classes_; }
    const std::string& provenance() const { return provenance_; }
    void set_provenance(std::string note) { provenance_ = std::move(note); }

    void save(const std::string& path) const;
    static LidModel load(const std::string& path);

private:
    struct ClassStats {
        double log_prior = 0.0;
        std::uint64_t doc_count = 0;
        // Per order (index 0 = unigrams): gram -> count, plus total gram count.
        std::vector<std::unordered_map<std::string, std::uint64_t>> gram_counts;
        std::vector<std::uint64_t> gram_totals;
    };

    std::vector<std::string> classes_;
    std::vector<ClassStats> stats_;
    std::vector<std::uint64_t> vocab_sizes_; // distinct grams per order, all classes
    std::string provenance_;
};

// Adapter interface: anything that maps text to a label distribution.
// predict_batch, when set, is preferred by bench_lid (command adapters run
// their subprocess once per batch, not once per row).
struct LidAdapter {
    std::string name;
    std::function<LabelDistribution(const std::string&)> predict;
    std::function<std::vector<LabelDistribution>(const std::vector<std::string>&)> predict_batch;
};

LidAdapter make_builtin_adapter(const LidModel& model, std::string name = "builtin");

// Line-protocol subprocess adapter: one text per line on stdin (newlines in
// the text are replaced by spaces), one "label<TAB>prob" per line on stdout.
// The command runs once over the whole batch; see bench_lid.
LidAdapter make_command_adapter(const std::string& command);

struct LidFilterStats {
    std::uint64_t input_count = 0;
    std::uint64_t kept_count = 0;
    std::map<std::string, std::uint64_t> drops_by_predicted;
};

// Keep d iff argmax P(l|d) == target AND P(target|d) >= threshold. Kept
// documents get meta["lid_conf"] = P(target|d) with 6 decimals.
std::pair<Corpus, LidFilterStats> filter_lid(const Corpus& input, const LidAdapter& adapter,
                                             const std::string& target, double threshold = 0.5,
                                             unsigned workers = 0);

struct LabeledText {
    std::string text;
    std::string label;
};

// Reserved confusion-matrix column for adapter failures / unknown labels.
inline constexpr const char* kErrorClass = "error";

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
    double f1_ci_lo = 0.0;
    double f1_ci_hi = 0.0;
};

struct LidBenchReport {
    std::string adapter;
    double accuracy = 0.0;
    double docs_per_sec = 0.0;
    std::vector<std::string> labels; // row/column order of the confusion matrix
    std::vector<std::vector<std::uint64_t>> confusion; // [true][predicted]
    std::map<std::string, ClassMetrics> per_class;
};

// Point metrics on the full test set; percentile-bootstrap CIs from
// `resamples` whole-set resamples (rows drawn with replacement using
// derive_seed(seed, resample_index)); resamples == 0 degenerates to a
// zero-width CI at the point estimate. Timing covers the predict loop only.
LidBenchReport bench_lid(const LidAdapter& adapter, const std::vector<LabeledText>& testset,
                         std::size_t resamples = 500, std::uint64_t seed = 0);

// Table row formatting: "0.884 [0.796, 0.945]".
std::string format_f1_ci(const ClassMetrics& m);

std::vector<LabeledText> read_labeled_jsonl(const std::string& path);

} // namespace winnow
