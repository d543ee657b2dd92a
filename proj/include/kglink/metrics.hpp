#pragma once

#include <string>
#include <vector>

#include "kglink/corpus.hpp"

namespace kglink {

struct SplitResult {
    std::vector<int> train, val, test;  // table indices into the corpus
};

// Table-level stratified split keyed by each table's first target label.
// Deterministic under seed; classes with fewer than 3 tables go wholly to
// train with a warning. Per-class sizes follow the ratios with largest-
// remainder rounding (train wins ties, then val, then test).
SplitResult stratified_split(const TableCorpus& corpus, std::uint64_t seed, double train_ratio,
                             double val_ratio, double test_ratio,
                             std::vector<std::string>* warnings = nullptr);

double accuracy(const std::vector<int>& preds, const std::vector<int>& gts);

struct ClassMetrics {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int support = 0;
};

struct MetricsReport {
    double accuracy = 0.0;
    double weighted_f1 = 0.0;
    std::vector<ClassMetrics> per_class;
    std::vector<std::vector<int>> confusion;  // [gt][pred]
    int total = 0;

    std::string to_json_string() const;
    std::string to_text() const;
};

// Support-weighted mean of per-class F1. Classes never seen (zero support,
// zero predictions) contribute nothing.
double weighted_f1(const std::vector<int>& preds, const std::vector<int>& gts, int n_labels);

MetricsReport compute_metrics(const std::vector<int>& preds, const std::vector<int>& gts,
                              const std::vector<std::string>& labels);

}  // namespace kglink
