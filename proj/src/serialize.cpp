#include "kglink/serialize.hpp"

#include <algorithm>

#include "kglink/text.hpp"

namespace kglink {

std::vector<int> prefix_ids(const ColumnCandidates& cc, const Vocabulary& vocab,
                            bool disable_types) {
    switch (cc.kind) {
        case ColumnKind::NumericSummary: {
            const auto& s = *cc.summary;
            std::string text = "num " + format_sig4(s.mean) + " " + format_sig4(s.variance) + " " +
                               format_sig4(s.median);
            return vocab.encode(tokenize(text));
        }
        case ColumnKind::Typed: {
            if (disable_types) return {Vocabulary::kPad};
            std::string text;
            for (const auto& t : cc.types) {
                if (!text.empty()) text += " ";
                text += t.label;
            }
            return vocab.encode(tokenize(text));
        }
        case ColumnKind::Padding:
            return {Vocabulary::kPad};
    }
    return {Vocabulary::kPad};
}

std::vector<int> serialize_column(const std::vector<std::string>& cells, const Vocabulary& vocab,
                                  int budget, int* dropped) {
    if (budget < 1) throw ValidationError("column token budget must be >= 1");
    std::vector<int> out;
    int over = 0;
    for (const auto& cell : cells) {
        for (const auto& tok : tokenize(cell)) {
            if (static_cast<int>(out.size()) < budget) {
                out.push_back(vocab.encode_token(tok));
            } else {
                ++over;
            }
        }
    }
    if (dropped) *dropped += over;
    return out;
}

namespace {

// One chunk of at most column_cap columns.
SerializedInput serialize_chunk(const AnnotatedTable& table, int col_begin, int col_end,
                                SerializeMode mode, const Vocabulary& vocab,
                                const SerializeBudgets& budgets, bool disable_types) {
    SerializedInput out;

    // Per-column prefix (mode tokens + candidate prefix), computed first so
    // the cell budget can be shrunk to respect the total budget.
    std::vector<std::vector<int>> prefixes;
    int overhead = 1;  // trailing SEQEND
    for (int c = col_begin; c < col_end; ++c) {
        const AnnotatedColumn& col = table.columns[static_cast<std::size_t>(c)];
        std::vector<int> prefix;
        if (mode == SerializeMode::Masked) {
            prefix.push_back(Vocabulary::kMask);
        } else if (mode == SerializeMode::GroundTruth && col.target) {
            if (!col.label) {
                throw ValidationError("table " + table.id + ": target column " +
                                      std::to_string(c) + " has no ground-truth label");
            }
            auto label_ids = vocab.encode(tokenize(*col.label));
            if (label_ids.empty()) label_ids.push_back(Vocabulary::kUnk);
            prefix.insert(prefix.end(), label_ids.begin(), label_ids.end());
        }
        auto cand = prefix_ids(col.candidates, vocab, disable_types);
        prefix.insert(prefix.end(), cand.begin(), cand.end());
        overhead += 1 + static_cast<int>(prefix.size());  // COLSTART + prefix
        prefixes.push_back(std::move(prefix));
    }

    int ncols = col_end - col_begin;
    int avail = budgets.max_seq - overhead;
    if (avail < ncols) {
        throw ValidationError("table " + table.id +
                              ": max_seq too small for prefixes alone (need " +
                              std::to_string(overhead + ncols) + " tokens)");
    }
    int cell_budget = std::min(budgets.col_token_budget, avail / ncols);
    out.truncation.effective_cell_budget = cell_budget;

    for (int c = col_begin; c < col_end; ++c) {
        ColumnSpan span;
        span.original_column = c;
        span.colstart_pos = static_cast<int>(out.ids.size());
        out.ids.push_back(Vocabulary::kColStart);
        if (mode != SerializeMode::Plain) span.mask_pos = static_cast<int>(out.ids.size());
        const auto& prefix = prefixes[static_cast<std::size_t>(c - col_begin)];
        out.ids.insert(out.ids.end(), prefix.begin(), prefix.end());

        std::vector<std::string> column_cells;
        column_cells.reserve(table.cells.size());
        for (const auto& row : table.cells) column_cells.push_back(row[static_cast<std::size_t>(c)]);
        auto cell_ids =
            serialize_column(column_cells, vocab, cell_budget, &out.truncation.cell_tokens_dropped);
        out.ids.insert(out.ids.end(), cell_ids.begin(), cell_ids.end());
        out.columns.push_back(span);
    }
    out.ids.push_back(Vocabulary::kSeqEnd);
    return out;
}

}  // namespace

std::vector<SerializedInput> serialize_table(const AnnotatedTable& table, SerializeMode mode,
                                             const Vocabulary& vocab,
                                             const SerializeBudgets& budgets, bool disable_types) {
    if (static_cast<int>(table.columns.size()) != table.ncols) {
        throw ValidationError("table " + table.id + ": every column needs its candidate annotation");
    }
    std::vector<SerializedInput> out;
    for (int begin = 0; begin < table.ncols; begin += budgets.column_cap) {
        int end = std::min(table.ncols, begin + budgets.column_cap);
        out.push_back(serialize_chunk(table, begin, end, mode, vocab, budgets, disable_types));
    }
    return out;
}

std::pair<std::vector<std::string>, std::optional<std::string>> build_feature_tokens(
    const FilteredTable& table, int column, const KnowledgeGraph& kg) {
    if (column < 0 || column >= table.ncols) {
        throw ValidationError("column out of range: " + std::to_string(column));
    }
    if (table.rows.empty()) return {{}, std::nullopt};

    // First cell of the column in the filtered (row-sorted) table; its
    // best-scoring pruned entity seeds the sequence.
    const PrunedCell& cell = table.rows[0].cells.at(static_cast<std::size_t>(column));
    if (cell.entries.empty()) return {{}, std::nullopt};
    const PrunedEntry* best = &cell.entries[0];
    for (const auto& e : cell.entries) {
        if (e.score > best->score ||
            (e.score == best->score && e.entity_id < best->entity_id)) {
            best = &e;
        }
    }

    std::vector<std::string> tokens = tokenize(kg.entity(best->entity_id).label);
    for (const auto& nb : kg.neighbors(best->entity_id)) {
        auto pred = tokenize(nb.predicate);
        tokens.insert(tokens.end(), pred.begin(), pred.end());
        auto lbl = tokenize(kg.entity(nb.target).label);
        tokens.insert(tokens.end(), lbl.begin(), lbl.end());
    }
    return {tokens, best->entity_id};
}

FeatureSequence encode_feature_tokens(const std::vector<std::string>& tokens,
                                      const std::optional<std::string>& source,
                                      const Vocabulary& vocab, int budget) {
    if (budget < 1) throw ValidationError("feature budget must be >= 1");
    FeatureSequence out;
    out.source_entity = source;
    if (tokens.empty()) {
        out.ids.push_back(Vocabulary::kPad);
        return out;
    }
    out.ids = vocab.encode(tokens);
    if (static_cast<int>(out.ids.size()) > budget) out.ids.resize(static_cast<std::size_t>(budget));
    return out;
}

FeatureSequence build_feature_sequence(const FilteredTable& table, int column,
                                       const KnowledgeGraph& kg, const Vocabulary& vocab,
                                       int budget) {
    auto [tokens, source] = build_feature_tokens(table, column, kg);
    return encode_feature_tokens(tokens, source, vocab, budget);
}

}  // namespace kglink
