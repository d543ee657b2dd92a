#pragma once

#include <string>
#include <vector>

#include "kglink/index.hpp"

namespace kglink {

enum class MentionKind { Text, Numeric, Date };

// Rule-based replacement for an NER pass. Numeric covers integers,
// decimals, signed values, percentages and thousands-separated numbers;
// Date covers ISO dates, d/m/y and m/d/y numeric dates, and month-name
// forms ("22 March 1994", "March 22, 1994", "Mar 1994"). Everything else,
// including the empty mention, is Text.
MentionKind classify_mention(const std::string& mention);

struct Candidate {
    std::string entity_id;
    double score;  // BM25 linking score
};

struct LinkedCell {
    int row = 0;
    int col = 0;
    std::string mention;
    MentionKind kind = MentionKind::Text;
    std::vector<Candidate> candidates;  // sorted by score descending
    // Final value is assigned by the pruning stage (max BM25 over the
    // pruned set); 0 until then and always 0 for Numeric/Date cells.
    double ls = 0.0;
};

struct LinkedRow {
    std::vector<LinkedCell> cells;
};

struct LinkedTable {
    std::string id;
    int ncols = 0;
    std::vector<LinkedRow> rows;
};

LinkedCell link_cell(const InvertedIndex& index, int row, int col, const std::string& mention,
                     std::size_t top_n);

LinkedTable link_table(const InvertedIndex& index, const std::string& table_id,
                       const std::vector<std::vector<std::string>>& cells, std::size_t top_n);

}  // namespace kglink
