#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kglink/candidate_types.hpp"
#include "kglink/vocab.hpp"

namespace kglink {

// Per-column annotation produced by the KG stage and consumed by the
// serializer and the model.
struct AnnotatedColumn {
    int index = 0;
    bool target = false;                      // has a ground-truth label
    std::optional<std::string> label;
    ColumnCandidates candidates;
    std::vector<std::string> feature_tokens;  // empty when no entity was retrieved
    std::optional<std::string> feature_entity;
    bool kg_linked = false;  // any cell of the column matched the KG
};

struct AnnotatedTable {
    std::string id;
    int ncols = 0;
    std::vector<std::vector<std::string>> cells;  // filtered rows, kept order
    std::vector<AnnotatedColumn> columns;
    std::vector<int> retained_row_ids;
    std::size_t total_rows = 0;
};

struct FeatureSequence {
    std::vector<int> ids;  // PAD-only when no entity was retrieved
    std::optional<std::string> source_entity;
};

enum class SerializeMode { Plain, GroundTruth, Masked };

struct ColumnSpan {
    int original_column = 0;
    int colstart_pos = 0;
    // Masked mode: position of the MASK token. GroundTruth mode: position
    // of the first ground-truth label token (the distillation anchor).
    // Absent in plain mode.
    std::optional<int> mask_pos;
};

struct TruncationReport {
    int cell_tokens_dropped = 0;
    int effective_cell_budget = 0;
};

struct SerializedInput {
    std::vector<int> ids;
    std::vector<ColumnSpan> columns;
    TruncationReport truncation;
};

struct SerializeBudgets {
    int col_token_budget = 64;
    int column_cap = 8;
    int max_seq = 512;
};

// The candidate-type prefix: up to j type labels for Typed columns,
// "num <mean> <variance> <median>" (4 significant digits) for numeric
// columns, a single PAD for columns with nothing to say. disable_types
// replaces Typed prefixes with PAD (numeric summaries are cell-derived
// and stay).
std::vector<int> prefix_ids(const ColumnCandidates& cc, const Vocabulary& vocab,
                            bool disable_types);

// Cell mentions of one column in row order, tokenized, concatenated and
// truncated to the budget.
std::vector<int> serialize_column(const std::vector<std::string>& cells, const Vocabulary& vocab,
                                  int budget, int* dropped = nullptr);

// Whole-table serialization; splits into several inputs when the table
// exceeds the column cap. Throws ValidationError in ground-truth mode if
// a target column has no label.
std::vector<SerializedInput> serialize_table(const AnnotatedTable& table, SerializeMode mode,
                                             const Vocabulary& vocab,
                                             const SerializeBudgets& budgets,
                                             bool disable_types = false);

// Token strings for the feature sequence of a column: best-linked entity
// of the first retained row's cell, then (predicate, neighbor-label)
// blocks in deterministic neighbor order. Empty when there is no entity.
std::pair<std::vector<std::string>, std::optional<std::string>> build_feature_tokens(
    const FilteredTable& table, int column, const KnowledgeGraph& kg);

FeatureSequence build_feature_sequence(const FilteredTable& table, int column,
                                       const KnowledgeGraph& kg, const Vocabulary& vocab,
                                       int budget);

// Encodes already-built feature tokens (the annotate stage stores tokens
// so a vocabulary is not needed until training).
FeatureSequence encode_feature_tokens(const std::vector<std::string>& tokens,
                                      const std::optional<std::string>& source,
                                      const Vocabulary& vocab, int budget);

}  // namespace kglink
