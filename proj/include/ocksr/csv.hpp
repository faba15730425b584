#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ocksr/kernel.hpp"

namespace ocksr {

struct CsvOptions {
    bool header = false;
    std::optional<std::string> label_name;       // column by header name (needs header)
    std::optional<std::size_t> label_index;      // column by 0-based index
};

struct CsvData {
    SampleMatrix samples;
    std::optional<std::vector<int>> labels;      // present when a label column was named
    std::vector<std::string> column_names;       // empty without a header
};

// Comma-separated decimal features; an optional {0,1} label column can be
// extracted by name or index. Errors carry the offending 1-based row/column.
CsvData load_csv(const std::string& path, const CsvOptions& opts = {});

void write_csv(const std::string& path, const SampleMatrix& samples,
               const std::vector<int>* labels, bool header);

}  // namespace ocksr
