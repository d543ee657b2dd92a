#pragma once

#include <set>
#include <string>
#include <vector>

#include "kglink/linking.hpp"

namespace kglink {

struct PrunedEntry {
    std::string entity_id;
    double score;  // BM25 linking score carried over from the candidate
    int os;        // overlap score: number of other columns whose candidate
                   // neighborhoods contain this entity
};

struct PrunedCell {
    int row = 0;
    int col = 0;
    std::string mention;
    MentionKind kind = MentionKind::Text;
    std::vector<PrunedEntry> entries;  // sorted by score desc, id asc
    double ls = 0.0;                   // max BM25 over entries, 0 if empty
};

struct PrunedRow {
    int original_index = 0;
    std::vector<PrunedCell> cells;
    double score = 0.0;  // sum of cell linking scores
};

enum class RowFilterMode { ScoreSorted, OriginalOrder };

struct FilteredTable {
    std::string id;
    int ncols = 0;
    std::size_t k = 0;
    std::size_t total_rows = 0;           // before filtering
    std::vector<PrunedRow> rows;          // at most k
    std::vector<int> retained_row_ids;    // original indices, in kept order
};

// The candidates of the target cell intersected with the one-hop
// neighborhoods of every other column's candidates, unioned over those
// columns. Single-column tables keep the unpruned candidate set.
std::set<std::string> overlap_entity_set(const LinkedRow& row, int target_col,
                                         const KnowledgeGraph& kg);

// How many other columns have the entity in the one-hop neighborhood of
// their candidate set (0/1 per column, summed).
int overlap_score(const std::string& entity_id, const LinkedRow& row, int target_col,
                  const KnowledgeGraph& kg);

double cell_linking_score(const PrunedCell& cell);
double row_linking_score(const PrunedRow& row);

// Applies the overlap pruning and scoring to every cell of the row.
PrunedRow prune_row(const LinkedRow& row, int original_index, const KnowledgeGraph& kg);

std::vector<PrunedRow> prune_table(const LinkedTable& table, const KnowledgeGraph& kg);

// ScoreSorted: rows ordered by linking score descending (ties by original
// index ascending), top k retained. OriginalOrder: first k rows in input
// order, scores ignored.
FilteredTable filter_rows(const std::string& table_id, int ncols, std::vector<PrunedRow> rows,
                          std::size_t k, RowFilterMode mode = RowFilterMode::ScoreSorted);

}  // namespace kglink
