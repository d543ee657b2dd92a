#include "kglink/candidate_types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "kglink/text.hpp"

namespace kglink {

std::set<std::string> column_entity_union(const FilteredTable& table, int column) {
    if (column < 0 || column >= table.ncols) {
        throw ValidationError("column out of range: " + std::to_string(column));
    }
    std::set<std::string> out;
    for (const auto& row : table.rows) {
        for (const auto& e : row.cells.at(static_cast<std::size_t>(column)).entries) {
            out.insert(e.entity_id);
        }
    }
    return out;
}

bool label_filter(const Entity& entity) {
    if (classify_mention(entity.label) == MentionKind::Date) return false;

    // Person-name heuristic on the raw label: at least two tokens, every
    // token starts with an uppercase letter, no digits anywhere.
    std::vector<std::string> raw_tokens;
    {
        std::string cur;
        for (char ch : entity.label) {
            if (std::isspace(static_cast<unsigned char>(ch))) {
                if (!cur.empty()) {
                    raw_tokens.push_back(cur);
                    cur.clear();
                }
            } else {
                cur.push_back(ch);
            }
        }
        if (!cur.empty()) raw_tokens.push_back(cur);
    }
    if (raw_tokens.size() >= 2) {
        bool all_capitalized = true;
        bool has_digit = false;
        for (const auto& t : raw_tokens) {
            if (!std::isupper(static_cast<unsigned char>(t[0]))) all_capitalized = false;
            for (char ch : t) {
                if (std::isdigit(static_cast<unsigned char>(ch))) has_digit = true;
            }
        }
        if (all_capitalized && !has_digit) return false;
    }
    return true;
}

std::map<std::string, double> candidate_type_scores(const FilteredTable& table, int column,
                                                    const KnowledgeGraph& kg) {
    if (column < 0 || column >= table.ncols) {
        throw ValidationError("column out of range: " + std::to_string(column));
    }

    // Nominating row per type: the first retained row (in kept order) with
    // a pruned entity whose neighborhood holds the type.
    std::map<std::string, std::size_t> nominated_at;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (const auto& e : table.rows[r].cells.at(static_cast<std::size_t>(column)).entries) {
            for (const auto& nb : kg.neighbors(e.entity_id)) {
                if (!label_filter(kg.entity(nb.target))) continue;
                nominated_at.emplace(nb.target, r);
            }
        }
    }

    std::map<std::string, double> scores;
    for (const auto& [type_id, r1] : nominated_at) {
        double cts = 0.0;
        for (std::size_t r2 = 0; r2 < table.rows.size(); ++r2) {
            if (r2 == r1) continue;
            // Each (row, entity) pair contributes at most once.
            std::set<std::string> seen;
            for (const auto& e : table.rows[r2].cells.at(static_cast<std::size_t>(column)).entries) {
                if (!seen.insert(e.entity_id).second) continue;
                for (const auto& nb : kg.neighbors(e.entity_id)) {
                    if (nb.target == type_id) {
                        cts += e.os;
                        break;
                    }
                }
            }
        }
        if (cts > 0.0) scores.emplace(type_id, cts);
    }
    return scores;
}

std::vector<CandidateType> select_candidate_types(const std::map<std::string, double>& scores,
                                                  const KnowledgeGraph& kg, std::size_t j) {
    if (j < 1) throw ValidationError("candidate type count j must be >= 1");
    std::vector<CandidateType> out;
    out.reserve(scores.size());
    for (const auto& [id, cts] : scores) out.push_back({id, kg.entity(id).label, cts});
    std::sort(out.begin(), out.end(), [](const CandidateType& a, const CandidateType& b) {
        if (a.cts != b.cts) return a.cts > b.cts;
        return a.type_id < b.type_id;
    });
    if (out.size() > j) out.resize(j);
    return out;
}

double parse_numeric(const std::string& mention) {
    std::string s = trim(mention);
    std::string cleaned;
    cleaned.reserve(s.size());
    bool percent = false;
    for (char ch : s) {
        if (ch == ',') continue;
        if (ch == '%') {
            percent = true;
            continue;
        }
        cleaned.push_back(ch);
    }
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(cleaned, &pos);
    } catch (const std::exception&) {
        throw ValidationError("cell is not numeric: '" + mention + "'");
    }
    if (pos != cleaned.size()) throw ValidationError("cell is not numeric: '" + mention + "'");
    return percent ? v / 100.0 : v;
}

NumericSummary numeric_summary(const std::vector<std::string>& values) {
    if (values.empty()) throw ValidationError("numeric summary of an empty column");
    std::vector<double> xs;
    xs.reserve(values.size());
    for (const auto& v : values) {
        if (classify_mention(v) != MentionKind::Numeric) {
            throw ValidationError("cell is not numeric: '" + v + "'");
        }
        xs.push_back(parse_numeric(v));
    }
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());

    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    std::size_t n = sorted.size();
    double median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    return {mean, var, median};
}

ColumnCandidates column_candidates(const FilteredTable& table, int column,
                                   const KnowledgeGraph& kg, std::size_t j, bool all_numeric) {
    ColumnCandidates out;
    out.column = column;
    if (all_numeric) {
        std::vector<std::string> values;
        for (const auto& row : table.rows) {
            values.push_back(row.cells.at(static_cast<std::size_t>(column)).mention);
        }
        out.kind = ColumnKind::NumericSummary;
        out.summary = numeric_summary(values);
        return out;
    }
    auto scores = candidate_type_scores(table, column, kg);
    auto types = select_candidate_types(scores, kg, j);
    if (types.empty()) {
        out.kind = ColumnKind::Padding;
    } else {
        out.kind = ColumnKind::Typed;
        out.types = std::move(types);
    }
    return out;
}

}  // namespace kglink
