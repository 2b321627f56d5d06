#include "winnow/corpus_io.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <unordered_set>
#include <utility>

#include <zlib.h>
#include <json.hpp>

#include "winnow/rng.hpp"
#include "winnow/unicode.hpp"

namespace winnow {

namespace {

using ordered_json = nlohmann::ordered_json;

// Line source abstraction so gzip and plain files share the parse path.
class LineSource {
public:
    virtual ~LineSource() = default;
    virtual bool next_line(std::string& out) = 0;
};

class FileLineSource : public LineSource {
public:
    explicit FileLineSource(const std::string& path) : in_(path, std::ios::binary) {
        if (!in_) throw CorpusIoError("cannot open " + path);
    }
    bool next_line(std::string& out) override {
        if (!std::getline(in_, out)) return false;
        if (!out.empty() && out.back() == '\r') out.pop_back();
        return true;
    }

private:
    std::ifstream in_;
};

class GzipLineSource : public LineSource {
public:
    explicit GzipLineSource(const std::string& path) : file_(gzopen(path.c_str(), "rb")) {
        if (!file_) throw CorpusIoError("cannot open " + path);
    }
    ~GzipLineSource() override {
        if (file_) gzclose(file_);
    }
    bool next_line(std::string& out) override {
        out.clear();
        while (true) {
            if (pos_ < buf_.size()) {
                std::size_t nl = buf_.find('\n', pos_);
                if (nl != std::string::npos) {
                    out.append(buf_, pos_, nl - pos_);
                    pos_ = nl + 1;
                    if (!out.empty() && out.back() == '\r') out.pop_back();
                    return true;
                }
                out.append(buf_, pos_, buf_.size() - pos_);
                pos_ = buf_.size();
            }
            char chunk[1 << 15];
            int got = gzread(file_, chunk, sizeof(chunk));
            if (got < 0) throw CorpusIoError("gzip read error");
            if (got == 0) return !out.empty(); // last line without newline
            buf_.assign(chunk, static_cast<std::size_t>(got));
            pos_ = 0;
        }
    }

private:
    gzFile file_;
    std::string buf_;
    std::size_t pos_ = 0;
};

std::unique_ptr<LineSource> open_source(const std::string& path, CorpusFormat format) {
    if (format == CorpusFormat::jsonl_compressed)
        return std::make_unique<GzipLineSource>(path);
    return std::make_unique<FileLineSource>(path);
}

Document parse_jsonl_row(const std::string& line, const std::string& path,
                         const std::string& source, std::uint32_t file_index,
                         std::uint64_t line_no) {
    ordered_json row;
    try {
        row = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw CorpusIoError(path + ": malformed JSON at line " + std::to_string(line_no) +
                            ": " + e.what());
    }
    if (!row.is_object())
        throw CorpusIoError(path + ": row is not an object at line " + std::to_string(line_no));
    if (!row.contains("text") || !row["text"].is_string())
        throw CorpusIoError(path + ": missing field text at line " + std::to_string(line_no));

    Document doc;
    doc.text = row["text"].get<std::string>();
    if (row.contains("id") && row["id"].is_string())
        doc.id = row["id"].get<std::string>();
    if (doc.id.empty())
        doc.id = source + ":" + std::to_string(file_index) + ":" + std::to_string(line_no);
    doc.source = row.contains("source") && row["source"].is_string()
                     ? row["source"].get<std::string>()
                     : source;
    if (row.contains("meta") && row["meta"].is_object()) {
        for (const auto& [k, v] : row["meta"].items()) {
            if (v.is_string()) doc.meta[k] = v.get<std::string>();
        }
    }
    return doc;
}

} // namespace

CorpusFormat parse_format(const std::string& name) {
    if (name == "jsonl") return CorpusFormat::jsonl;
    if (name == "jsonl-compressed" || name == "jsonl.gz")
        return CorpusFormat::jsonl_compressed;
    if (name == "plain-text-per-line" || name == "text")
        return CorpusFormat::plain_text;
    throw CorpusIoError("unknown corpus format: " + name);
}

std::string format_name(CorpusFormat format) {
    switch (format) {
        case CorpusFormat::jsonl: return "jsonl";
        case CorpusFormat::jsonl_compressed: return "jsonl-compressed";
        case CorpusFormat::plain_text: return "plain-text-per-line";
    }
    return "jsonl";
}

CorpusFormat infer_format(const std::string& path) {
    if (path.ends_with(".gz")) return CorpusFormat::jsonl_compressed;
    if (path.ends_with(".txt")) return CorpusFormat::plain_text;
    return CorpusFormat::jsonl;
}

void for_each_document(const std::string& path, CorpusFormat format,
                       const std::string& source, std::uint32_t file_index,
                       const std::function<void(Document&&)>& fn) {
    std::string src = source.empty() ? std::filesystem::path(path).stem().string() : source;
    auto lines = open_source(path, format);
    std::string line;
    std::uint64_t line_no = 0;
    while (lines->next_line(line)) {
        ++line_no;
        Document doc;
        if (format == CorpusFormat::plain_text) {
            std::size_t bad_at = 0;
            if (!uni::is_valid_utf8(line, &bad_at)) {
                throw CorpusIoError(path + ": invalid UTF-8 at line " + std::to_string(line_no) +
                                    ", byte offset " + std::to_string(bad_at));
            }
            doc.text = line;
            doc.source = src;
            doc.id = src + ":" + std::to_string(file_index) + ":" + std::to_string(line_no);
        } else {
            doc = parse_jsonl_row(line, path, src, file_index, line_no);
            // nlohmann validates string escapes but raw UTF-8 passes through;
            // reject here so downstream phases can assume valid text.
            std::size_t bad_at = 0;
            if (!uni::is_valid_utf8(doc.text, &bad_at)) {
                throw CorpusIoError(path + ": invalid UTF-8 in text at line " +
                                    std::to_string(line_no) + ", byte offset " +
                                    std::to_string(bad_at));
            }
        }
        if (doc.id.empty())
            throw CorpusIoError(path + ": empty id at line " + std::to_string(line_no));
        fn(std::move(doc));
    }
}

Corpus read_corpus(const std::string& path, CorpusFormat format,
                   const std::string& source, std::uint32_t file_index) {
    Corpus corpus;
    std::unordered_set<std::string> seen;
    for_each_document(path, format, source, file_index, [&](Document&& doc) {
        if (!seen.insert(doc.id).second)
            throw CorpusIoError(path + ": duplicate id \"" + doc.id + "\"");
        corpus.push_back(std::move(doc));
    });
    return corpus;
}

std::string document_to_jsonl(const Document& doc) {
    ordered_json row;
    row["id"] = doc.id;
    row["source"] = doc.source;
    row["text"] = doc.text;
    row["meta"] = ordered_json::object();
    for (const auto& [k, v] : doc.meta) row["meta"][k] = v;
    return row.dump();
}

void write_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CorpusIoError("cannot open for writing: " + path);
    for (const Document& doc : corpus) {
        out << document_to_jsonl(doc) << '\n';
    }
    if (!out) throw CorpusIoError("write failed: " + path);
}

Corpus shuffle(Corpus corpus, std::uint64_t seed) {
    seeded_shuffle(corpus, seed);
    return corpus;
}

} // namespace winnow
