#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kglink/config.hpp"
#include "kglink/metrics.hpp"
#include "kglink/model.hpp"

namespace kglink {

// Full KG stage for one table: link, prune, row-filter, candidate types,
// feature tokens.
AnnotatedTable annotate_table(const RawTable& table, const InvertedIndex& index,
                              const KnowledgeGraph& kg, const Config& cfg);

// Annotates every table; config.workers > 1 splits the corpus across
// threads (the per-table work is independent and the output order is
// fixed, so results do not depend on the worker count).
std::vector<AnnotatedTable> annotate_corpus(const TableCorpus& corpus, const InvertedIndex& index,
                                            const KnowledgeGraph& kg, const Config& cfg);

// Everything the trainer needs: stratified split, vocabulary from the
// training split only, and serialized model items per split.
struct PreparedCorpus {
    SplitResult split;
    Vocabulary vocab;
    std::vector<std::string> labels;       // training label set (model output space)
    std::vector<std::string> eval_labels;  // labels + unseen eval labels appended
    std::vector<AnnotatedTable> annotated;
    std::vector<ModelItem> train_items, val_items, test_items;
};

PreparedCorpus prepare_corpus(const TableCorpus& corpus, const KnowledgeGraph& kg,
                              const InvertedIndex& index, const Config& cfg,
                              std::vector<std::string>* warnings = nullptr);

// Builds the serialized items for a list of annotated tables (exposed for
// tests and the prediction path).
std::vector<ModelItem> build_items(const std::vector<const AnnotatedTable*>& tables,
                                   const Vocabulary& vocab,
                                   const std::vector<std::string>& eval_labels, const Config& cfg);

struct EvalOutcome {
    MetricsReport report;
    std::vector<int> preds, gts;
    std::vector<bool> no_kg_linkage;  // per eval column
};

EvalOutcome evaluate_items(ModelState& state, const std::vector<ModelItem>& items,
                           const std::vector<std::string>& eval_labels);

// Train on a prepared corpus; returns the model and per-epoch metrics.
struct TrainOutcome {
    ModelState state;
    TrainResult history;
    MetricsReport val_report;
    MetricsReport test_report;
    EvalOutcome test_outcome;
};

TrainOutcome run_training(const TableCorpus& corpus, const KnowledgeGraph& kg,
                          const InvertedIndex& index, const Config& cfg,
                          std::vector<std::string>* warnings = nullptr);

// One row of an ablation / filter comparison report.
struct ComparisonRow {
    std::string name;
    double accuracy = 0.0;
    double weighted_f1 = 0.0;
    double wall_seconds = 0.0;
};

// Trains every variant with the shared seed and split; the mutator edits a
// copy of the base config.
std::vector<ComparisonRow> run_ablation(
    const TableCorpus& corpus, const KnowledgeGraph& kg, const InvertedIndex& index,
    const Config& base,
    const std::vector<std::pair<std::string, std::function<void(Config&)>>>& variants);

// Score-sorted vs original-order row filters over a sweep of k values.
std::vector<ComparisonRow> compare_row_filters(const TableCorpus& corpus,
                                               const KnowledgeGraph& kg,
                                               const InvertedIndex& index, const Config& base,
                                               const std::vector<int>& k_values);

// Machine-readable annotation report (one JSON object per table per line).
std::string annotation_report_jsonl(const std::vector<AnnotatedTable>& tables);
std::string annotation_report_text(const std::vector<AnnotatedTable>& tables);

// Line-delimited inspection dump of serialized inputs (token ids + marker
// positions).
std::string serialized_dump_jsonl(const std::vector<AnnotatedTable>& tables,
                                  const Vocabulary& vocab, const Config& cfg);

}  // namespace kglink
