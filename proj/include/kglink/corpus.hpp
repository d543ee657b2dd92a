#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kglink/common.hpp"

namespace kglink {

struct RawTable {
    std::string id;
    std::vector<std::string> header;  // optional, empty when absent
    std::vector<std::vector<std::string>> cells;  // rectangular, rows x cols
    std::vector<std::optional<std::string>> labels;  // per column

    int ncols() const { return cells.empty() ? 0 : static_cast<int>(cells[0].size()); }
    int nrows() const { return static_cast<int>(cells.size()); }
};

struct TableCorpus {
    std::vector<RawTable> tables;
    std::vector<std::string> label_set;  // sorted distinct labels

    const RawTable* find(const std::string& id) const;
    void rebuild_label_set();
};

// Tables file: blocks introduced by "= <table_id>" (append " header" to
// mark a header row), then one tab-separated row per line, blank line or
// next block ends the table. See README for the exact grammar.
std::vector<RawTable> load_tables(const std::string& path);

// Sidecar labels file: "<table_id>\t<column_index>\t<label>" per line.
void load_labels(const std::string& path, std::vector<RawTable>& tables);

TableCorpus load_corpus(const std::string& tables_path, const std::string& labels_path);

std::string tables_to_string(const std::vector<RawTable>& tables);
std::string labels_to_string(const std::vector<RawTable>& tables);

}  // namespace kglink
