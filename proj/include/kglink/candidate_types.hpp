#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kglink/filtering.hpp"

namespace kglink {

struct CandidateType {
    std::string type_id;
    std::string label;
    double cts;  // candidate type score, > 0
};

struct NumericSummary {
    double mean;
    double variance;  // population variance
    double median;
};

enum class ColumnKind { Typed, NumericSummary, Padding };

struct ColumnCandidates {
    int column = 0;
    ColumnKind kind = ColumnKind::Padding;
    std::vector<CandidateType> types;          // Typed: sorted by cts desc, id asc
    std::optional<NumericSummary> summary;     // NumericSummary only
};

// Union of pruned entity sets over the retained rows (Eq. 7 shape).
std::set<std::string> column_entity_union(const FilteredTable& table, int column);

// False for date-like labels and for person-name-like labels (>= 2 tokens,
// every raw token capitalized, no digits); true otherwise. Entities that
// fail are excluded from type candidacy.
bool label_filter(const Entity& entity);

// Candidate type scores for a column: a type is nominated by the first
// retained row holding a pruned entity that neighbors it; its score sums,
// over all other retained rows, the overlap scores of entities whose
// neighborhoods contain the type. Scores are integers by construction and
// strictly positive entries only.
std::map<std::string, double> candidate_type_scores(const FilteredTable& table, int column,
                                                    const KnowledgeGraph& kg);

// Top-j by cts descending, ties broken by type id ascending.
std::vector<CandidateType> select_candidate_types(const std::map<std::string, double>& scores,
                                                  const KnowledgeGraph& kg, std::size_t j);

// Mean, population variance and median of a numeric column. Throws
// ValidationError naming the offending cell on unparseable input, and on
// empty input.
NumericSummary numeric_summary(const std::vector<std::string>& values);

// Parses mentions accepted by the Numeric classifier ("1,234.5", "45%").
double parse_numeric(const std::string& mention);

// Full per-column decision: Typed, NumericSummary (all cells numeric over
// the whole original column) or Padding. `all_numeric` is the caller's
// verdict over the original (unfiltered) column.
ColumnCandidates column_candidates(const FilteredTable& table, int column,
                                   const KnowledgeGraph& kg, std::size_t j, bool all_numeric);

}  // namespace kglink
