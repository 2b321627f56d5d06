#pragma once

#include <map>
#include <string>
#include <vector>

namespace winnow {

// One text unit flowing through the pipeline. `meta` carries per-phase
// annotations (e.g. "ftfy_fixed"="true", "lid_conf"="0.974210"); a sorted
// map keeps serialized output byte-stable.
struct Document {
    std::string id;
    std::string source;
    std::string text;
    std::map<std::string, std::string> meta;

    bool operator==(const Document& other) const = default;
};

using Corpus = std::vector<Document>;

} // namespace winnow
