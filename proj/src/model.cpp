#include "kglink/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#include "json.hpp"
#include "kglink/metrics.hpp"

namespace kglink {

using nlohmann::json;

void Heads::init(const ModelDims& dims, double temp, Rng& rng, ComposeMode compose) {
    temperature = temp;
    w_vocab.init("w_vocab", dims.vocab, dims.dim, true);
    w_comp.init("w_comp", dims.dim, 2 * dims.dim, true);
    b_comp.init("b_comp", 1, dims.dim, false);
    w_cls.init("w_cls", dims.labels, dims.dim, true);
    b_cls.init("b_cls", 1, dims.labels, false);
    log_sigma0.init("log_sigma0", 1, 1, false);
    log_sigma1.init("log_sigma1", 1, 1, false);

    for (Eigen::Index i = 0; i < w_vocab.value.rows(); ++i) {
        for (Eigen::Index j = 0; j < w_vocab.value.cols(); ++j) {
            w_vocab.value(i, j) = rng.normal(0.0, 0.02);
        }
    }
    // Identity blocks: the linear composition starts out as plain addition.
    w_comp.value.setZero();
    for (int i = 0; i < dims.dim; ++i) {
        w_comp.value(i, i) = 1.0;
        w_comp.value(i, dims.dim + i) = 1.0;
    }
    (void)compose;
    for (Eigen::Index i = 0; i < w_cls.value.rows(); ++i) {
        for (Eigen::Index j = 0; j < w_cls.value.cols(); ++j) {
            w_cls.value(i, j) = rng.normal(0.0, 0.02);
        }
    }
}

std::vector<ParamTensor*> Heads::params() {
    return {&w_vocab, &w_comp, &b_comp, &w_cls, &b_cls, &log_sigma0, &log_sigma1};
}

Vec vocab_project(const Mat& w_vocab, const Vec& h, double temperature) {
    if (temperature <= 0.0) throw ValidationError("temperature must be > 0");
    Vec z = w_vocab * (h / temperature);
    return softmax_vec(z);
}

double dmlm_loss(const Vec& y_msk, const Vec& y_gt) {
    if (y_msk.size() != y_gt.size()) throw ValidationError("distribution size mismatch");
    double loss = 0.0;
    for (Eigen::Index v = 0; v < y_msk.size(); ++v) {
        loss -= y_msk(v) * std::log(std::max(y_gt(v), 1e-300));
    }
    return loss;
}

double cross_entropy_loss(const Vec& logits, int gt_label) {
    if (gt_label < 0 || gt_label >= logits.size()) throw ValidationError("label out of range");
    double mx = logits.maxCoeff();
    double lse = 0.0;
    for (Eigen::Index i = 0; i < logits.size(); ++i) lse += std::exp(logits(i) - mx);
    return std::log(lse) + mx - logits(gt_label);
}

double combined_loss(double l_dmlm, double l_ce, double sigma0, double sigma1,
                     bool masked_task_disabled) {
    if (sigma0 <= 0.0 || sigma1 <= 0.0) throw ValidationError("sigmas must be positive");
    double ce_term = l_ce / (2.0 * sigma1 * sigma1) + std::log(sigma1);
    if (masked_task_disabled) return ce_term;
    return l_dmlm / (2.0 * sigma0 * sigma0) + std::log(sigma0) + ce_term;
}

Vec compose_vectors(const Heads& heads, const Vec& y_cls, const Vec& y_fv, ComposeMode mode) {
    if (mode == ComposeMode::Sum) return y_cls + y_fv;
    Eigen::Index d = y_cls.size();
    Vec cat(2 * d);
    cat.head(d) = y_cls;
    cat.tail(d) = y_fv;
    return heads.w_comp.value * cat + heads.b_comp.value.row(0).transpose();
}

std::vector<ParamTensor*> ModelState::all_params() {
    auto out = encoder->params();
    auto hp = heads.params();
    out.insert(out.end(), hp.begin(), hp.end());
    return out;
}

ModelState ModelState::create(const ModelDims& dims, const Vocabulary& vocab,
                              const std::vector<std::string>& labels, const Config& config) {
    ModelState st;
    st.dims = dims;
    st.encoder = std::make_unique<Encoder>(dims);
    st.vocab = vocab;
    st.labels = labels;
    st.config = config;
    Rng rng(config.seed);
    st.encoder->init_weights(rng);
    st.heads.init(dims, config.temperature, rng, config.compose_mode());
    return st;
}

namespace {

int count_target_columns(const std::vector<const ModelItem*>& batch) {
    int n = 0;
    for (const ModelItem* item : batch) {
        for (int l : item->label_ids) {
            if (l >= 0) ++n;
        }
    }
    return n;
}

}  // namespace

double model_batch_loss(ModelState& state, const std::vector<const ModelItem*>& batch,
                        bool training, bool accumulate_grads, Rng* drop_rng,
                        double* out_mean_dmlm, double* out_mean_ce) {
    const Config& cfg = state.config;
    Encoder& enc = *state.encoder;
    Heads& heads = state.heads;
    const bool masked_on = !cfg.disable_masked_task;
    const bool fv_on = !cfg.disable_feature_vector;
    const ComposeMode compose = cfg.compose_mode();
    const DmlmDirection direction = cfg.dmlm_mode();
    const int d = state.dims.dim;

    const int n_cols = count_target_columns(batch);
    if (n_cols == 0) {
        if (out_mean_dmlm) *out_mean_dmlm = 0.0;
        if (out_mean_ce) *out_mean_ce = 0.0;
        return 0.0;
    }

    const double s0 = heads.log_sigma0.value(0, 0);
    const double s1 = heads.log_sigma1.value(0, 0);
    const double c_ce = std::exp(-2.0 * s1) / 2.0 / n_cols;
    const double c_dmlm = masked_on ? std::exp(-2.0 * s0) / 2.0 / n_cols : 0.0;

    double sum_ce = 0.0;
    double sum_dmlm = 0.0;

    for (const ModelItem* item : batch) {
        EncoderTrace tr_plain;
        Mat y_plain = enc.forward(item->plain.ids, training, cfg.dropout, drop_rng,
                                  accumulate_grads ? &tr_plain : nullptr);

        const bool do_dmlm = masked_on && item->has_ground_truth;
        EncoderTrace tr_msk;
        Mat y_msk_seq, y_gt_seq;
        if (do_dmlm) {
            y_msk_seq = enc.forward(item->masked.ids, training, cfg.dropout, drop_rng,
                                    accumulate_grads ? &tr_msk : nullptr);
            // Teacher branch: eval mode, gradients blocked.
            y_gt_seq = enc.forward(item->ground_truth.ids, false, 0.0, nullptr, nullptr);
        }

        Mat d_plain, d_msk;
        if (accumulate_grads) {
            d_plain = Mat::Zero(y_plain.rows(), y_plain.cols());
            if (do_dmlm) d_msk = Mat::Zero(y_msk_seq.rows(), y_msk_seq.cols());
        }
        bool any_dmlm_grad = false;

        for (std::size_t c = 0; c < item->label_ids.size(); ++c) {
            int gt = item->label_ids[c];
            if (gt < 0) continue;

            int cls_pos = item->plain.columns[c].colstart_pos;
            Vec y_cls = y_plain.row(cls_pos).transpose();

            Vec y_fv = Vec::Zero(d);
            EncoderTrace tr_fv;
            Mat y_fv_seq;
            if (fv_on) {
                y_fv_seq = enc.forward(item->features[c].ids, training, cfg.dropout, drop_rng,
                                       accumulate_grads ? &tr_fv : nullptr);
                y_fv = y_fv_seq.row(0).transpose();
            }

            Vec y_col = compose_vectors(heads, y_cls, y_fv, compose);
            Vec logits = heads.w_cls.value * y_col + heads.b_cls.value.row(0).transpose();
            Vec p = softmax_vec(logits);
            sum_ce += cross_entropy_loss(logits, gt);

            if (accumulate_grads) {
                Vec d_logits = p;
                d_logits(gt) -= 1.0;
                d_logits *= c_ce;
                heads.w_cls.grad += d_logits * y_col.transpose();
                heads.b_cls.grad.row(0) += d_logits.transpose();
                Vec d_y_col = heads.w_cls.value.transpose() * d_logits;

                Vec d_y_cls, d_y_fv;
                if (compose == ComposeMode::Sum) {
                    d_y_cls = d_y_col;
                    d_y_fv = d_y_col;
                } else {
                    Vec cat(2 * d);
                    cat.head(d) = y_cls;
                    cat.tail(d) = y_fv;
                    heads.w_comp.grad += d_y_col * cat.transpose();
                    heads.b_comp.grad.row(0) += d_y_col.transpose();
                    Vec d_cat = heads.w_comp.value.transpose() * d_y_col;
                    d_y_cls = d_cat.head(d);
                    d_y_fv = d_cat.tail(d);
                }
                d_plain.row(cls_pos) += d_y_cls.transpose();
                if (fv_on) {
                    Mat d_fv_seq = Mat::Zero(y_fv_seq.rows(), y_fv_seq.cols());
                    d_fv_seq.row(0) = d_y_fv.transpose();
                    enc.backward(tr_fv, d_fv_seq);
                }
            }

            if (do_dmlm) {
                int mk = *item->masked.columns[c].mask_pos;
                int an = *item->ground_truth.columns[c].mask_pos;
                Vec h_m = y_msk_seq.row(mk).transpose();
                Vec h_g = y_gt_seq.row(an).transpose();
                Vec y_m = vocab_project(heads.w_vocab.value, h_m, heads.temperature);
                Vec y_g = vocab_project(heads.w_vocab.value, h_g, heads.temperature);
                double l_d = direction == DmlmDirection::MaskOnGt ? dmlm_loss(y_m, y_g)
                                                                  : dmlm_loss(y_g, y_m);
                sum_dmlm += l_d;

                if (accumulate_grads) {
                    Vec dz(y_m.size());
                    if (direction == DmlmDirection::MaskOnGt) {
                        // L = -sum y_m log y_g with y_g constant.
                        Vec log_g = y_g.array().max(1e-300).log().matrix();
                        double mean_c = y_m.dot(log_g);
                        dz = y_m.cwiseProduct((Vec::Constant(y_m.size(), mean_c) - log_g)) * c_dmlm;
                    } else {
                        // L = -sum y_g log y_m with y_g constant.
                        dz = (y_m - y_g) * c_dmlm;
                    }
                    heads.w_vocab.grad += dz * (h_m / heads.temperature).transpose();
                    Vec d_h_m = heads.w_vocab.value.transpose() * dz / heads.temperature;
                    d_msk.row(mk) += d_h_m.transpose();
                    any_dmlm_grad = true;
                }
            }
        }

        if (accumulate_grads) {
            enc.backward(tr_plain, d_plain);
            if (any_dmlm_grad) enc.backward(tr_msk, d_msk);
        }
    }

    double mean_dmlm = masked_on ? sum_dmlm / n_cols : 0.0;
    double mean_ce = sum_ce / n_cols;
    if (out_mean_dmlm) *out_mean_dmlm = mean_dmlm;
    if (out_mean_ce) *out_mean_ce = mean_ce;

    if (accumulate_grads && masked_on) {
        heads.log_sigma0.grad(0, 0) += 1.0 - std::exp(-2.0 * s0) * mean_dmlm;
        heads.log_sigma1.grad(0, 0) += 1.0 - std::exp(-2.0 * s1) * mean_ce;
    }
    return combined_loss(mean_dmlm, mean_ce, std::exp(s0), std::exp(s1), !masked_on);
}

namespace {

// AdamW with decoupled weight decay and bias correction.
class AdamW {
public:
    AdamW(const std::vector<ParamTensor*>& params, double weight_decay)
        : weight_decay_(weight_decay) {
        for (const ParamTensor* p : params) {
            m_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
            v_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
        }
    }

    void step(const std::vector<ParamTensor*>& params, double lr, bool freeze_sigmas) {
        ++t_;
        double bc1 = 1.0 - std::pow(beta1_, t_);
        double bc2 = 1.0 - std::pow(beta2_, t_);
        for (std::size_t i = 0; i < params.size(); ++i) {
            ParamTensor& p = *params[i];
            if (freeze_sigmas && (p.name == "log_sigma0" || p.name == "log_sigma1")) continue;
            m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
            v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.cwiseProduct(p.grad);
            Mat mhat = m_[i] / bc1;
            Mat vhat = v_[i] / bc2;
            p.value -= lr * (mhat.array() / (vhat.array().sqrt() + eps_)).matrix();
            if (p.decay && weight_decay_ > 0.0) p.value -= lr * weight_decay_ * p.value;
        }
    }

private:
    double beta1_ = 0.9;
    double beta2_ = 0.999;
    double eps_ = 1e-6;
    double weight_decay_;
    long t_ = 0;
    std::vector<Mat> m_, v_;
};

std::vector<Mat> snapshot_params(const std::vector<ParamTensor*>& params) {
    std::vector<Mat> out;
    out.reserve(params.size());
    for (const ParamTensor* p : params) out.push_back(p->value);
    return out;
}

void restore_params(const std::vector<ParamTensor*>& params, const std::vector<Mat>& snap) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = snap[i];
}

void eval_items(ModelState& state, const std::vector<ModelItem>& items, std::vector<int>& preds,
                std::vector<int>& gts) {
    auto predictions = predict(state, items, false);
    std::size_t pi = 0;
    for (const auto& item : items) {
        for (std::size_t c = 0; c < item.label_ids.size(); ++c) {
            const Prediction& pred = predictions[pi++];
            if (item.label_ids[c] >= 0) {
                preds.push_back(pred.label_id);
                gts.push_back(item.label_ids[c]);
            }
        }
    }
}

}  // namespace

TrainResult train_model(ModelState& state, const std::vector<ModelItem>& train_items,
                        const std::vector<ModelItem>& val_items) {
    const Config& cfg = state.config;
    auto params = state.all_params();
    for (ParamTensor* p : params) p->grad.setZero();

    AdamW opt(params, cfg.weight_decay);
    Rng shuffle_rng(cfg.seed * 7919 + 17);
    Rng drop_rng(cfg.seed * 104729 + 29);

    std::vector<int> order(train_items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    const long batches_per_epoch =
        (static_cast<long>(train_items.size()) + cfg.batch_size - 1) / cfg.batch_size;
    const long total_steps = std::max<long>(1, batches_per_epoch * cfg.epochs);
    long step = 0;

    TrainResult result;
    std::vector<Mat> best_snapshot;
    int stale_epochs = 0;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        double epoch_dmlm = 0.0;
        double epoch_ce = 0.0;
        long epoch_batches = 0;
        double last_lr = 0.0;

        for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
            std::vector<const ModelItem*> batch;
            for (std::size_t i = begin; i < std::min(order.size(), begin + cfg.batch_size); ++i) {
                batch.push_back(&train_items[static_cast<std::size_t>(order[i])]);
            }
            for (ParamTensor* p : params) p->grad.setZero();
            double md = 0.0, mce = 0.0;
            double loss = model_batch_loss(state, batch, true, true, &drop_rng, &md, &mce);
            double lr = cfg.learning_rate *
                        std::max(0.0, 1.0 - static_cast<double>(step) / static_cast<double>(total_steps));
            opt.step(params, lr, cfg.disable_masked_task);
            ++step;
            epoch_loss += loss;
            epoch_dmlm += md;
            epoch_ce += mce;
            ++epoch_batches;
            last_lr = lr;
        }

        EpochMetrics em;
        em.epoch = epoch;
        em.train_loss = epoch_loss / static_cast<double>(epoch_batches);
        em.train_dmlm = epoch_dmlm / static_cast<double>(epoch_batches);
        em.train_ce = epoch_ce / static_cast<double>(epoch_batches);
        em.sigma0 = std::exp(state.heads.log_sigma0.value(0, 0));
        em.sigma1 = std::exp(state.heads.log_sigma1.value(0, 0));
        em.lr = last_lr;

        if (!val_items.empty()) {
            std::vector<int> preds, gts;
            eval_items(state, val_items, preds, gts);
            if (!preds.empty()) {
                em.val_accuracy = accuracy(preds, gts);
                em.val_weighted_f1 = weighted_f1(preds, gts, static_cast<int>(state.labels.size()));
            }
        }
        result.epochs.push_back(em);

        if (result.best_epoch < 0 || em.val_weighted_f1 > result.best_val_f1) {
            result.best_epoch = epoch;
            result.best_val_f1 = em.val_weighted_f1;
            best_snapshot = snapshot_params(params);
            stale_epochs = 0;
        } else {
            ++stale_epochs;
            if (stale_epochs >= cfg.patience) break;
        }
    }

    if (!best_snapshot.empty()) restore_params(params, best_snapshot);
    return result;
}

std::vector<Prediction> predict(ModelState& state, const std::vector<ModelItem>& items,
                                bool also_compute_masked) {
    Encoder& enc = *state.encoder;
    Heads& heads = state.heads;
    const Config& cfg = state.config;
    const ComposeMode compose = cfg.compose_mode();
    const bool fv_on = !cfg.disable_feature_vector;
    const int d = state.dims.dim;

    std::vector<Prediction> out;
    for (const ModelItem& item : items) {
        Mat y_plain = enc.forward(item.plain.ids, false, 0.0, nullptr, nullptr);
        if (also_compute_masked) {
            // Permitted at inference; its output is unused.
            (void)enc.forward(item.masked.ids, false, 0.0, nullptr, nullptr);
        }
        for (std::size_t c = 0; c < item.original_columns.size(); ++c) {
            Vec y_cls = y_plain.row(item.plain.columns[c].colstart_pos).transpose();
            Vec y_fv = Vec::Zero(d);
            if (fv_on) {
                Mat seq = enc.forward(item.features[c].ids, false, 0.0, nullptr, nullptr);
                y_fv = seq.row(0).transpose();
            }
            Vec y_col = compose_vectors(heads, y_cls, y_fv, compose);
            Vec logits = heads.w_cls.value * y_col + heads.b_cls.value.row(0).transpose();
            Prediction pred;
            pred.table_id = item.table_id;
            pred.column = item.original_columns[c];
            pred.scores = softmax_vec(logits);
            Eigen::Index best = 0;
            pred.scores.maxCoeff(&best);
            pred.label_id = static_cast<int>(best);
            pred.label = state.labels[static_cast<std::size_t>(best)];
            pred.no_kg_linkage = item.no_kg_linkage[c];
            out.push_back(std::move(pred));
        }
    }
    return out;
}

GradCheckReport gradient_check(ModelState& state, const std::vector<const ModelItem*>& batch,
                               double tolerance, int samples_per_param,
                               std::uint64_t sample_seed) {
    auto params = state.all_params();
    for (ParamTensor* p : params) p->grad.setZero();
    model_batch_loss(state, batch, false, true, nullptr);

    // Token embedding rows only make sense for ids that occur in the batch.
    std::set<int> used_ids;
    int max_len = 1;
    for (const ModelItem* item : batch) {
        for (const auto* seq : {&item->plain.ids, &item->masked.ids, &item->ground_truth.ids}) {
            used_ids.insert(seq->begin(), seq->end());
            max_len = std::max(max_len, static_cast<int>(seq->size()));
        }
        for (const auto& f : item->features) {
            used_ids.insert(f.ids.begin(), f.ids.end());
            max_len = std::max(max_len, static_cast<int>(f.ids.size()));
        }
    }
    std::vector<int> used_id_list(used_ids.begin(), used_ids.end());

    GradCheckReport report;
    report.tolerance = tolerance;
    Rng rng(sample_seed);
    const double h = 1e-5;
    std::vector<GradCheckEntry> entries;

    for (ParamTensor* p : params) {
        long size = static_cast<long>(p->value.rows()) * p->value.cols();
        int want = static_cast<int>(std::min<long>(samples_per_param, size));
        for (int s = 0; s < want; ++s) {
            int row, col;
            if (p->name == "tok_emb") {
                row = used_id_list[static_cast<std::size_t>(rng.uniform(used_id_list.size()))];
                col = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(p->value.cols())));
            } else if (p->name == "pos_emb") {
                row = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(max_len)));
                col = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(p->value.cols())));
            } else {
                row = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(p->value.rows())));
                col = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(p->value.cols())));
            }
            double saved = p->value(row, col);
            p->value(row, col) = saved + h;
            double lp = model_batch_loss(state, batch, false, false, nullptr);
            p->value(row, col) = saved - h;
            double lm = model_batch_loss(state, batch, false, false, nullptr);
            p->value(row, col) = saved;

            GradCheckEntry e;
            e.param = p->name;
            e.row = row;
            e.col = col;
            e.analytic = p->grad(row, col);
            e.numeric = (lp - lm) / (2.0 * h);
            double denom = std::max({std::abs(e.analytic), std::abs(e.numeric), 1e-6});
            e.rel_error = std::abs(e.analytic - e.numeric) / denom;
            entries.push_back(e);
            ++report.checked;
        }
    }

    std::sort(entries.begin(), entries.end(),
              [](const GradCheckEntry& a, const GradCheckEntry& b) {
                  return a.rel_error > b.rel_error;
              });
    report.worst_rel_error = entries.empty() ? 0.0 : entries.front().rel_error;
    report.passed = report.worst_rel_error < tolerance;
    std::size_t keep = std::min<std::size_t>(entries.size(), 10);
    report.worst.assign(entries.begin(), entries.begin() + static_cast<long>(keep));
    return report;
}

// --- Checkpointing ---

namespace {
constexpr char kCkptMagic[8] = {'K', 'G', 'L', 'N', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCkptVersion = 1;
}  // namespace

void save_checkpoint(const ModelState& state, const std::string& path) {
    json header;
    header["config"] = json::parse(state.config.to_json_string());
    header["labels"] = state.labels;
    header["vocab"] = state.vocab.to_string();
    header["dims"] = {{"vocab", state.dims.vocab},   {"dim", state.dims.dim},
                      {"layers", state.dims.layers}, {"heads", state.dims.heads},
                      {"max_seq", state.dims.max_seq}, {"ff_mult", state.dims.ff_mult},
                      {"labels", state.dims.labels}};
    auto params = const_cast<ModelState&>(state).all_params();
    auto names = json::array();
    for (const ParamTensor* p : params) {
        names.push_back({{"name", p->name},
                         {"rows", p->value.rows()},
                         {"cols", p->value.cols()}});
    }
    header["params"] = names;
    std::string header_str = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    out.write(kCkptMagic, sizeof(kCkptMagic));
    std::uint32_t version = kCkptVersion;
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    std::uint64_t hlen = header_str.size();
    out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
    out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
    for (const ParamTensor* p : params) {
        // Eigen default storage is column-major; write as-is and read as-is.
        out.write(reinterpret_cast<const char*>(p->value.data()),
                  static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(
                                                                    p->value.size())));
    }
    if (!out) throw IoError("checkpoint write failed: " + path);
}

ModelState load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCkptMagic, sizeof(magic)) != 0) {
        throw ValidationError("not a checkpoint file: " + path);
    }
    std::uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (version != kCkptVersion) {
        throw ValidationError("checkpoint version mismatch: file has " + std::to_string(version) +
                              ", expected " + std::to_string(kCkptVersion));
    }
    std::uint64_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    std::string header_str(hlen, '\0');
    in.read(header_str.data(), static_cast<std::streamsize>(hlen));
    if (!in) throw ParseError("truncated checkpoint header: " + path);

    json header;
    try {
        header = json::parse(header_str);
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad checkpoint header: ") + e.what());
    }

    Config config = Config::from_json_string(header["config"].dump());
    std::vector<std::string> labels = header["labels"].get<std::vector<std::string>>();
    Vocabulary vocab = Vocabulary::from_string(header["vocab"].get<std::string>());
    ModelDims dims;
    dims.vocab = header["dims"]["vocab"].get<int>();
    dims.dim = header["dims"]["dim"].get<int>();
    dims.layers = header["dims"]["layers"].get<int>();
    dims.heads = header["dims"]["heads"].get<int>();
    dims.max_seq = header["dims"]["max_seq"].get<int>();
    dims.ff_mult = header["dims"]["ff_mult"].get<int>();
    dims.labels = header["dims"]["labels"].get<int>();

    ModelState state = ModelState::create(dims, vocab, labels, config);
    auto params = state.all_params();
    const auto& names = header["params"];
    if (names.size() != params.size()) throw ValidationError("checkpoint parameter list mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        ParamTensor& p = *params[i];
        if (names[i]["name"].get<std::string>() != p.name ||
            names[i]["rows"].get<long>() != p.value.rows() ||
            names[i]["cols"].get<long>() != p.value.cols()) {
            throw ValidationError("checkpoint tensor mismatch at " + p.name);
        }
        in.read(reinterpret_cast<char*>(p.value.data()),
                static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(
                                                                  p.value.size())));
    }
    if (!in) throw ParseError("truncated checkpoint tensors: " + path);
    return state;
}

}  // namespace kglink
