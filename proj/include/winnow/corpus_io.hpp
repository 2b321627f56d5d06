#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include "winnow/document.hpp"

namespace winnow {

enum class CorpusFormat {
    jsonl,            // one JSON object per line
    jsonl_compressed, // gzip-wrapped JSONL
    plain_text,       // one document per line, text only
};

CorpusFormat parse_format(const std::string& name);
std::string format_name(CorpusFormat format);

// .gz -> compressed, .txt -> plain text, anything else JSONL.
CorpusFormat infer_format(const std::string& path);

struct CorpusIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Streams documents in file order, invoking fn per document. JSONL rows may
// carry {id, source, text, meta}; only "text" is mandatory. Missing ids are
// synthesized as "<source>:<file_index>:<line>". Malformed JSON, missing
// fields and invalid UTF-8 raise CorpusIoError naming the file and position.
void for_each_document(const std::string& path, CorpusFormat format,
                       const std::string& source, std::uint32_t file_index,
                       const std::function<void(Document&&)>& fn);

// Materializes a whole file; enforces id uniqueness within the stream.
Corpus read_corpus(const std::string& path, CorpusFormat format,
                   const std::string& source = "", std::uint32_t file_index = 0);

// One JSON object per line, keys in the fixed order {id, source, text, meta},
// no trailing whitespace: two runs over the same stream are byte-identical.
void write_corpus(const Corpus& corpus, const std::string& path);

std::string document_to_jsonl(const Document& doc);

// Deterministic Fisher-Yates permutation (see rng.hpp for the generator).
Corpus shuffle(Corpus corpus, std::uint64_t seed);

} // namespace winnow
