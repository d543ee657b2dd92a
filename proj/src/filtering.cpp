#include "kglink/filtering.hpp"

#include <algorithm>

namespace kglink {

namespace {

std::set<std::string> candidate_ids(const LinkedCell& cell) {
    std::set<std::string> out;
    for (const auto& c : cell.candidates) out.insert(c.entity_id);
    return out;
}

}  // namespace

std::set<std::string> overlap_entity_set(const LinkedRow& row, int target_col,
                                         const KnowledgeGraph& kg) {
    const auto& target = row.cells.at(static_cast<std::size_t>(target_col));
    std::set<std::string> own = candidate_ids(target);
    if (row.cells.size() == 1) {
        // No other columns to intersect against; keep the unpruned set
        // rather than discarding all KG signal.
        return own;
    }
    std::set<std::string> kept;
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
        if (static_cast<int>(c) == target_col) continue;
        std::set<std::string> hop = kg.one_hop_set(candidate_ids(row.cells[c]));
        for (const auto& id : own) {
            if (hop.count(id)) kept.insert(id);
        }
    }
    return kept;
}

int overlap_score(const std::string& entity_id, const LinkedRow& row, int target_col,
                  const KnowledgeGraph& kg) {
    int os = 0;
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
        if (static_cast<int>(c) == target_col) continue;
        std::set<std::string> hop = kg.one_hop_set(candidate_ids(row.cells[c]));
        if (hop.count(entity_id)) ++os;
    }
    return os;
}

double cell_linking_score(const PrunedCell& cell) {
    double best = 0.0;
    for (const auto& e : cell.entries) best = std::max(best, e.score);
    return best;
}

double row_linking_score(const PrunedRow& row) {
    double sum = 0.0;
    for (const auto& c : row.cells) sum += cell_linking_score(c);
    return sum;
}

PrunedRow prune_row(const LinkedRow& row, int original_index, const KnowledgeGraph& kg) {
    PrunedRow out;
    out.original_index = original_index;
    out.cells.reserve(row.cells.size());

    // One-hop neighborhoods per column are shared across target cells;
    // compute them once.
    std::vector<std::set<std::string>> hops(row.cells.size());
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
        hops[c] = kg.one_hop_set(candidate_ids(row.cells[c]));
    }

    for (std::size_t c = 0; c < row.cells.size(); ++c) {
        const LinkedCell& cell = row.cells[c];
        PrunedCell pc;
        pc.row = cell.row;
        pc.col = cell.col;
        pc.mention = cell.mention;
        pc.kind = cell.kind;
        for (const auto& cand : cell.candidates) {
            int os = 0;
            for (std::size_t c2 = 0; c2 < row.cells.size(); ++c2) {
                if (c2 == c) continue;
                if (hops[c2].count(cand.entity_id)) ++os;
            }
            bool keep = row.cells.size() == 1 ? true : os > 0;
            if (keep) pc.entries.push_back({cand.entity_id, cand.score, os});
        }
        std::sort(pc.entries.begin(), pc.entries.end(),
                  [](const PrunedEntry& a, const PrunedEntry& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return a.entity_id < b.entity_id;
                  });
        pc.ls = cell_linking_score(pc);
        out.cells.push_back(std::move(pc));
    }
    out.score = row_linking_score(out);
    return out;
}

std::vector<PrunedRow> prune_table(const LinkedTable& table, const KnowledgeGraph& kg) {
    std::vector<PrunedRow> rows;
    rows.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        rows.push_back(prune_row(table.rows[r], static_cast<int>(r), kg));
    }
    return rows;
}

FilteredTable filter_rows(const std::string& table_id, int ncols, std::vector<PrunedRow> rows,
                          std::size_t k, RowFilterMode mode) {
    if (k < 1) throw ValidationError("row filter k must be >= 1");
    FilteredTable out;
    out.id = table_id;
    out.ncols = ncols;
    out.k = k;
    out.total_rows = rows.size();
    if (mode == RowFilterMode::ScoreSorted) {
        std::stable_sort(rows.begin(), rows.end(), [](const PrunedRow& a, const PrunedRow& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.original_index < b.original_index;
        });
    }
    if (rows.size() > k) rows.resize(k);
    for (const auto& r : rows) out.retained_row_ids.push_back(r.original_index);
    out.rows = std::move(rows);
    return out;
}

}  // namespace kglink
