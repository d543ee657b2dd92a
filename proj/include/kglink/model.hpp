#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kglink/config.hpp"
#include "kglink/encoder.hpp"
#include "kglink/serialize.hpp"

namespace kglink {

// Task heads on top of the encoder: vocabulary projection (with the
// distillation temperature), classification, the column/feature
// composition and the two trainable loss-balance scalars (stored as
// log-sigmas so positivity holds by construction).
struct Heads {
    ParamTensor w_vocab;             // V x d
    ParamTensor w_comp, b_comp;      // d x 2d, 1 x d
    ParamTensor w_cls, b_cls;        // L x d, 1 x L
    ParamTensor log_sigma0, log_sigma1;  // 1 x 1
    double temperature = 2.0;

    void init(const ModelDims& dims, double temp, Rng& rng, ComposeMode compose);
    std::vector<ParamTensor*> params();
};

// --- Loss primitives (also the oracle-facing surface) ---

// softmax(W (h / T)); components positive, sum to 1.
Vec vocab_project(const Mat& w_vocab, const Vec& h, double temperature);

// -sum_v y_msk[v] * log(y_gt[v])  (the formula as printed; the gt side is
// the gradient-blocked teacher).
double dmlm_loss(const Vec& y_msk, const Vec& y_gt);

// -log softmax(logits)[gt]
double cross_entropy_loss(const Vec& logits, int gt_label);

// l_dmlm / (2 sigma0^2) + l_ce / (2 sigma1^2) + log(sigma0 * sigma1);
// with the masked task disabled the sigma0 terms drop.
double combined_loss(double l_dmlm, double l_ce, double sigma0, double sigma1,
                     bool masked_task_disabled = false);

Vec compose_vectors(const Heads& heads, const Vec& y_cls, const Vec& y_fv, ComposeMode mode);

// --- One serialized training/eval example (a table chunk) ---

struct ModelItem {
    std::string table_id;
    SerializedInput plain;
    SerializedInput masked;
    SerializedInput ground_truth;  // built only when labels exist
    bool has_ground_truth = false;
    std::vector<FeatureSequence> features;   // per column in the chunk
    std::vector<int> label_ids;              // per column, -1 when not a target
    std::vector<int> original_columns;       // chunk column -> table column
    std::vector<bool> no_kg_linkage;         // per column: numeric or zero-match
};

struct ModelState {
    ModelDims dims;
    std::unique_ptr<Encoder> encoder;
    Heads heads;
    Vocabulary vocab;
    std::vector<std::string> labels;
    Config config;

    std::vector<ParamTensor*> all_params();

    static ModelState create(const ModelDims& dims, const Vocabulary& vocab,
                             const std::vector<std::string>& labels, const Config& config);
};

struct Prediction {
    std::string table_id;
    int column = 0;
    int label_id = 0;
    std::string label;
    Vec scores;  // softmax over the label set
    bool no_kg_linkage = false;
};

struct EpochMetrics {
    int epoch = 0;
    double train_loss = 0.0;
    double train_dmlm = 0.0;
    double train_ce = 0.0;
    double val_accuracy = 0.0;
    double val_weighted_f1 = 0.0;
    double sigma0 = 1.0;
    double sigma1 = 1.0;
    double lr = 0.0;
};

struct TrainResult {
    std::vector<EpochMetrics> epochs;
    int best_epoch = -1;
    double best_val_f1 = 0.0;
};

// Batch forward/backward shared by training and the gradient checker.
// Returns the combined objective; per-parameter gradients are accumulated
// when `accumulate_grads` is true. Dropout fires only when training is
// true and cfg.dropout > 0.
double model_batch_loss(ModelState& state, const std::vector<const ModelItem*>& batch,
                        bool training, bool accumulate_grads, Rng* drop_rng,
                        double* out_mean_dmlm = nullptr, double* out_mean_ce = nullptr);

TrainResult train_model(ModelState& state, const std::vector<ModelItem>& train_items,
                        const std::vector<ModelItem>& val_items);

std::vector<Prediction> predict(ModelState& state, const std::vector<ModelItem>& items,
                                bool also_compute_masked = false);

// --- Gradient checking ---

struct GradCheckEntry {
    std::string param;
    int row = 0, col = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_error = 0.0;
};

struct GradCheckReport {
    bool passed = false;
    double tolerance = 1e-4;
    double worst_rel_error = 0.0;
    std::vector<GradCheckEntry> worst;  // offenders (or worst few when passing)
    int checked = 0;
};

// Central finite differences (step 1e-5) on a sampled subset of every
// parameter group against the analytic gradients of the full combined
// objective. Dropout is forced off so the loss is a deterministic function
// of the parameters.
GradCheckReport gradient_check(ModelState& state, const std::vector<const ModelItem*>& batch,
                               double tolerance, int samples_per_param = 20,
                               std::uint64_t sample_seed = 1234);

// --- Checkpointing ---

void save_checkpoint(const ModelState& state, const std::string& path);
ModelState load_checkpoint(const std::string& path);

}  // namespace kglink
