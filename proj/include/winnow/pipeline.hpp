#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "winnow/config.hpp"
#include "winnow/document.hpp"

namespace winnow {

struct PhaseRow {
    std::string phase;
    std::uint64_t docs_in = 0;
    std::uint64_t docs_out = 0;
    double retention_vs_raw = 0.0; // docs_out / raw input count
    double drop_vs_previous = 0.0; // 1 - docs_out / docs_in
    double elapsed_seconds = 0.0;  // reported separately; see timings.json
};

struct RetentionReport {
    std::uint64_t raw_count = 0;
    std::vector<PhaseRow> rows;
    // source -> per-phase surviving document counts (raw first).
    std::map<std::string, std::vector<std::uint64_t>> per_source_funnel;
};

struct PipelineResult {
    RetentionReport retention;
    std::string out_dir;
    std::uint64_t final_count = 0;
};

// Runs phases 1-6 in order, writing each phase's corpus under out_dir plus
// per-phase JSON reports, retention.json / retention.md, timings.json and
// the release artifacts (train.jsonl, validation.jsonl, SHASUMS,
// manifest.json, tokenizer.json). Output bytes are independent of `workers`.
PipelineResult run_pipeline(const PipelineConfig& config, const std::string& out_dir,
                            unsigned workers = 0);

std::string retention_to_markdown(const RetentionReport& report);

} // namespace winnow
