#pragma once

#include <string>
#include <vector>

#include "kglink/common.hpp"
#include "kglink/filtering.hpp"

namespace kglink {

enum class ComposeMode { Linear, Sum };
enum class DmlmDirection { MaskOnGt, GtOnMask };

struct Config {
    // Paths
    std::string kg_path;
    std::string tables_path;
    std::string labels_path;
    std::string out_dir = "kglink_out";
    std::string index_cache;   // optional
    std::string checkpoint;    // train output / eval input

    // Pipeline knobs
    int top_n = 10;            // entities retrieved per mention
    int types_per_column = 3;  // j
    int top_k_rows = 25;       // k
    int col_token_budget = 64;
    int column_cap = 8;
    int max_seq = 512;
    int feature_budget = 128;
    double bm25_k1 = 1.2;
    double bm25_b = 0.75;
    std::string row_filter = "sorted";  // "sorted" | "original"

    // Model knobs
    int hidden_dim = 64;
    int layers = 2;
    int heads = 4;
    double temperature = 2.0;
    double learning_rate = 3e-3;
    double weight_decay = 0.01;
    int epochs = 20;
    int batch_size = 16;
    double dropout = 0.1;
    int patience = 5;          // early stopping, epochs without val improvement
    std::uint64_t seed = 0;

    // Ablations / variants
    bool disable_masked_task = false;
    bool disable_candidate_types = false;
    bool disable_feature_vector = false;
    std::string compose = "linear";         // "linear" | "sum"
    std::string dmlm_direction = "msk_gt";  // "msk_gt" (as printed) | "gt_msk"

    // Split
    double train_ratio = 0.7;
    double val_ratio = 0.1;
    double test_ratio = 0.2;

    int workers = 1;  // cmd_annotate parallelism

    ComposeMode compose_mode() const;
    DmlmDirection dmlm_mode() const;
    RowFilterMode row_filter_mode() const;

    void validate() const;
    std::string to_json_string() const;
    static Config from_json_string(const std::string& text);
    static Config from_json_file(const std::string& path);
};

}  // namespace kglink
