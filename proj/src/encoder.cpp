#include "kglink/encoder.hpp"

#include <cmath>

namespace kglink {

namespace {

constexpr double kLnEps = 1e-5;
constexpr double kMaskScore = -1e30;

// y = g .* xhat + b per row; caches xhat and 1/std.
Mat layer_norm_forward(const Mat& x, const RowVec& g, const RowVec& b, Mat& xhat_out,
                       Vec& inv_std_out) {
    const auto n = x.rows();
    const auto d = x.cols();
    Mat y(n, d);
    xhat_out.resize(n, d);
    inv_std_out.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double mean = x.row(i).mean();
        double var = (x.row(i).array() - mean).square().mean();
        double inv_std = 1.0 / std::sqrt(var + kLnEps);
        inv_std_out(i) = inv_std;
        xhat_out.row(i) = ((x.row(i).array() - mean) * inv_std).matrix();
        y.row(i) = xhat_out.row(i).cwiseProduct(g) + b;
    }
    return y;
}

// dx from dy given cached xhat and inv_std; accumulates dg, db.
Mat layer_norm_backward(const Mat& dy, const Mat& xhat, const Vec& inv_std, const RowVec& g,
                        Mat& dg, Mat& db) {
    const auto n = dy.rows();
    const auto d = dy.cols();
    Mat dx(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        RowVec dyg = dy.row(i).cwiseProduct(g);
        double m1 = dyg.mean();
        double m2 = dyg.cwiseProduct(xhat.row(i)).mean();
        dx.row(i) = ((dyg.array() - m1 - xhat.row(i).array() * m2) * inv_std(i)).matrix();
    }
    dg.row(0) += (dy.cwiseProduct(xhat)).colwise().sum();
    db.row(0) += dy.colwise().sum();
    return dx;
}

Mat make_dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng& rng) {
    Mat mask(rows, cols);
    double keep = 1.0 - p;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            mask(i, j) = rng.uniform_real() < p ? 0.0 : 1.0 / keep;
        }
    }
    return mask;
}

}  // namespace

void softmax_rows_inplace(Mat& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double mx = m.row(i).maxCoeff();
        m.row(i) = (m.row(i).array() - mx).exp().matrix();
        m.row(i) /= m.row(i).sum();
    }
}

Vec softmax_vec(const Vec& z) {
    double mx = z.maxCoeff();
    Vec e = (z.array() - mx).exp().matrix();
    return e / e.sum();
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * 0.7071067811865476)); }

double gelu_grad(double x) {
    double cdf = 0.5 * (1.0 + std::erf(x * 0.7071067811865476));
    double pdf = 0.3989422804014327 * std::exp(-0.5 * x * x);
    return cdf + x * pdf;
}

Encoder::Encoder(const ModelDims& dims) : dims_(dims) {
    if (dims_.dim % dims_.heads != 0) throw ValidationError("heads must divide hidden dim");
    tok_emb_.init("tok_emb", dims_.vocab, dims_.dim, false);
    pos_emb_.init("pos_emb", dims_.max_seq, dims_.dim, false);
    layers_.resize(static_cast<std::size_t>(dims_.layers));
    for (int l = 0; l < dims_.layers; ++l) {
        auto& ly = layers_[static_cast<std::size_t>(l)];
        std::string p = "layer" + std::to_string(l) + ".";
        ly.wq.init(p + "wq", dims_.dim, dims_.dim, true);
        ly.bq.init(p + "bq", 1, dims_.dim, false);
        ly.wk.init(p + "wk", dims_.dim, dims_.dim, true);
        ly.bk.init(p + "bk", 1, dims_.dim, false);
        ly.wv.init(p + "wv", dims_.dim, dims_.dim, true);
        ly.bv.init(p + "bv", 1, dims_.dim, false);
        ly.wo.init(p + "wo", dims_.dim, dims_.dim, true);
        ly.bo.init(p + "bo", 1, dims_.dim, false);
        ly.ln1_g.init(p + "ln1_g", 1, dims_.dim, false);
        ly.ln1_b.init(p + "ln1_b", 1, dims_.dim, false);
        ly.w1.init(p + "w1", dims_.dim, dims_.ff_dim(), true);
        ly.b1.init(p + "b1", 1, dims_.ff_dim(), false);
        ly.w2.init(p + "w2", dims_.ff_dim(), dims_.dim, true);
        ly.b2.init(p + "b2", 1, dims_.dim, false);
        ly.ln2_g.init(p + "ln2_g", 1, dims_.dim, false);
        ly.ln2_b.init(p + "ln2_b", 1, dims_.dim, false);
    }
}

void Encoder::init_weights(Rng& rng) {
    auto fill_normal = [&rng](Mat& m, double std) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal(0.0, std);
        }
    };
    fill_normal(tok_emb_.value, 0.02);
    fill_normal(pos_emb_.value, 0.02);
    for (auto& ly : layers_) {
        fill_normal(ly.wq.value, 0.02);
        fill_normal(ly.wk.value, 0.02);
        fill_normal(ly.wv.value, 0.02);
        fill_normal(ly.wo.value, 0.02);
        fill_normal(ly.w1.value, 0.02);
        fill_normal(ly.w2.value, 0.02);
        ly.ln1_g.value.setOnes();
        ly.ln2_g.value.setOnes();
        ly.bq.value.setZero();
        ly.bk.value.setZero();
        ly.bv.value.setZero();
        ly.bo.value.setZero();
        ly.b1.value.setZero();
        ly.b2.value.setZero();
        ly.ln1_b.value.setZero();
        ly.ln2_b.value.setZero();
    }
}

Mat Encoder::forward(const std::vector<int>& ids, bool training, double dropout, Rng* drop_rng,
                     EncoderTrace* trace) const {
    const int n = static_cast<int>(ids.size());
    if (n == 0) throw ValidationError("cannot encode an empty sequence");
    if (n > dims_.max_seq) {
        throw ValidationError("sequence length " + std::to_string(n) + " exceeds max_seq " +
                              std::to_string(dims_.max_seq));
    }
    for (int id : ids) {
        if (id < 0 || id >= dims_.vocab) {
            throw ValidationError("token id out of range: " + std::to_string(id));
        }
    }
    const bool use_dropout = training && dropout > 0.0;
    if (use_dropout && !drop_rng) throw ValidationError("dropout requires an RNG");

    std::vector<unsigned char> key_allowed(static_cast<std::size_t>(n), 0);
    bool any_real = false;
    for (int i = 0; i < n; ++i) {
        if (ids[static_cast<std::size_t>(i)] != 0 /* PAD */) {
            key_allowed[static_cast<std::size_t>(i)] = 1;
            any_real = true;
        }
    }
    const bool allow_all = !any_real;

    Mat x(n, dims_.dim);
    for (int i = 0; i < n; ++i) {
        x.row(i) = tok_emb_.value.row(ids[static_cast<std::size_t>(i)]) + pos_emb_.value.row(i);
    }
    if (use_dropout) {
        Mat mask = make_dropout_mask(n, dims_.dim, dropout, *drop_rng);
        x = x.cwiseProduct(mask);
        if (trace) trace->emb_drop_mask = std::move(mask);
    }
    if (trace) {
        trace->ids = ids;
        trace->key_allowed = key_allowed;
        trace->allow_all_keys = allow_all;
        trace->x0 = x;
        trace->layers.clear();
        trace->layers.resize(layers_.size());
    }

    const int hd = dims_.head_dim();
    const double scale = 1.0 / std::sqrt(static_cast<double>(hd));

    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Layer& ly = layers_[l];
        LayerTrace* lt = trace ? &trace->layers[l] : nullptr;
        if (lt) lt->x_in = x;

        Mat q = (x * ly.wq.value).rowwise() + ly.bq.value.row(0);
        Mat k = (x * ly.wk.value).rowwise() + ly.bk.value.row(0);
        Mat v = (x * ly.wv.value).rowwise() + ly.bv.value.row(0);

        Mat ctx(n, dims_.dim);
        std::vector<Mat> probs;
        if (lt) probs.reserve(static_cast<std::size_t>(dims_.heads));
        for (int h = 0; h < dims_.heads; ++h) {
            auto qh = q.middleCols(h * hd, hd);
            auto kh = k.middleCols(h * hd, hd);
            auto vh = v.middleCols(h * hd, hd);
            Mat scores = qh * kh.transpose() * scale;
            if (!allow_all) {
                for (int j = 0; j < n; ++j) {
                    if (!key_allowed[static_cast<std::size_t>(j)]) scores.col(j).setConstant(kMaskScore);
                }
            }
            softmax_rows_inplace(scores);
            ctx.middleCols(h * hd, hd) = scores * vh;
            if (lt) probs.push_back(std::move(scores));
        }
        Mat attn_out = (ctx * ly.wo.value).rowwise() + ly.bo.value.row(0);
        if (lt) {
            lt->q = std::move(q);
            lt->k = std::move(k);
            lt->v = std::move(v);
            lt->attn = std::move(probs);
            lt->ctx = std::move(ctx);
        }
        if (use_dropout) {
            Mat mask = make_dropout_mask(n, dims_.dim, dropout, *drop_rng);
            attn_out = attn_out.cwiseProduct(mask);
            if (lt) lt->attn_drop_mask = std::move(mask);
        }

        Mat ln1_in = x + attn_out;
        Mat xhat1;
        Vec inv1;
        Mat x_mid = layer_norm_forward(ln1_in, ly.ln1_g.value.row(0), ly.ln1_b.value.row(0), xhat1,
                                       inv1);
        if (lt) {
            lt->ln1_in = std::move(ln1_in);
            lt->ln1_xhat = std::move(xhat1);
            lt->ln1_inv_std = std::move(inv1);
            lt->x_mid = x_mid;
        }

        Mat ff_pre = (x_mid * ly.w1.value).rowwise() + ly.b1.value.row(0);
        Mat ff_act = ff_pre.unaryExpr([](double t) { return gelu(t); });
        Mat ff_out = (ff_act * ly.w2.value).rowwise() + ly.b2.value.row(0);
        if (lt) {
            lt->ff_pre = std::move(ff_pre);
            lt->ff_act = std::move(ff_act);
        }
        if (use_dropout) {
            Mat mask = make_dropout_mask(n, dims_.dim, dropout, *drop_rng);
            ff_out = ff_out.cwiseProduct(mask);
            if (lt) lt->ff_drop_mask = std::move(mask);
        }

        Mat ln2_in = x_mid + ff_out;
        Mat xhat2;
        Vec inv2;
        x = layer_norm_forward(ln2_in, ly.ln2_g.value.row(0), ly.ln2_b.value.row(0), xhat2, inv2);
        if (lt) {
            lt->ln2_in = std::move(ln2_in);
            lt->ln2_xhat = std::move(xhat2);
            lt->ln2_inv_std = std::move(inv2);
        }
    }
    return x;
}

void Encoder::backward(const EncoderTrace& trace, const Mat& d_out) {
    const int n = static_cast<int>(trace.ids.size());
    const int hd = dims_.head_dim();
    const double scale = 1.0 / std::sqrt(static_cast<double>(hd));

    Mat dx = d_out;
    for (int l = dims_.layers - 1; l >= 0; --l) {
        Layer& ly = layers_[static_cast<std::size_t>(l)];
        const LayerTrace& lt = trace.layers[static_cast<std::size_t>(l)];

        // LN2
        Mat d_ln2_in = layer_norm_backward(dx, lt.ln2_xhat, lt.ln2_inv_std, ly.ln2_g.value.row(0),
                                           ly.ln2_g.grad, ly.ln2_b.grad);
        Mat d_x_mid = d_ln2_in;
        Mat d_ff_out = d_ln2_in;
        if (lt.ff_drop_mask.size() > 0) d_ff_out = d_ff_out.cwiseProduct(lt.ff_drop_mask);

        // FFN
        ly.w2.grad += lt.ff_act.transpose() * d_ff_out;
        ly.b2.grad.row(0) += d_ff_out.colwise().sum();
        Mat d_ff_act = d_ff_out * ly.w2.value.transpose();
        Mat d_ff_pre =
            d_ff_act.cwiseProduct(lt.ff_pre.unaryExpr([](double t) { return gelu_grad(t); }));
        ly.w1.grad += lt.x_mid.transpose() * d_ff_pre;
        ly.b1.grad.row(0) += d_ff_pre.colwise().sum();
        d_x_mid += d_ff_pre * ly.w1.value.transpose();

        // LN1
        Mat d_ln1_in = layer_norm_backward(d_x_mid, lt.ln1_xhat, lt.ln1_inv_std,
                                           ly.ln1_g.value.row(0), ly.ln1_g.grad, ly.ln1_b.grad);
        Mat d_x = d_ln1_in;
        Mat d_attn_out = d_ln1_in;
        if (lt.attn_drop_mask.size() > 0) d_attn_out = d_attn_out.cwiseProduct(lt.attn_drop_mask);

        // Output projection
        ly.wo.grad += lt.ctx.transpose() * d_attn_out;
        ly.bo.grad.row(0) += d_attn_out.colwise().sum();
        Mat d_ctx = d_attn_out * ly.wo.value.transpose();

        Mat dq(n, dims_.dim), dk(n, dims_.dim), dv(n, dims_.dim);
        for (int h = 0; h < dims_.heads; ++h) {
            auto qh = lt.q.middleCols(h * hd, hd);
            auto kh = lt.k.middleCols(h * hd, hd);
            auto vh = lt.v.middleCols(h * hd, hd);
            const Mat& p = lt.attn[static_cast<std::size_t>(h)];
            auto d_ctx_h = d_ctx.middleCols(h * hd, hd);

            Mat dp = d_ctx_h * vh.transpose();
            dv.middleCols(h * hd, hd) = p.transpose() * d_ctx_h;

            // softmax backward, row-wise
            Mat ds(n, n);
            for (int i = 0; i < n; ++i) {
                double dot = dp.row(i).dot(p.row(i));
                ds.row(i) = p.row(i).cwiseProduct((dp.row(i).array() - dot).matrix());
            }
            dq.middleCols(h * hd, hd) = ds * kh * scale;
            dk.middleCols(h * hd, hd) = ds.transpose() * qh * scale;
        }

        ly.wq.grad += lt.x_in.transpose() * dq;
        ly.bq.grad.row(0) += dq.colwise().sum();
        ly.wk.grad += lt.x_in.transpose() * dk;
        ly.bk.grad.row(0) += dk.colwise().sum();
        ly.wv.grad += lt.x_in.transpose() * dv;
        ly.bv.grad.row(0) += dv.colwise().sum();

        d_x += dq * ly.wq.value.transpose();
        d_x += dk * ly.wk.value.transpose();
        d_x += dv * ly.wv.value.transpose();
        dx = std::move(d_x);
    }

    if (trace.emb_drop_mask.size() > 0) dx = dx.cwiseProduct(trace.emb_drop_mask);
    for (int i = 0; i < n; ++i) {
        tok_emb_.grad.row(trace.ids[static_cast<std::size_t>(i)]) += dx.row(i);
        pos_emb_.grad.row(i) += dx.row(i);
    }
}

std::vector<ParamTensor*> Encoder::params() {
    std::vector<ParamTensor*> out;
    out.push_back(&tok_emb_);
    out.push_back(&pos_emb_);
    for (auto& ly : layers_) {
        for (ParamTensor* p : {&ly.wq, &ly.bq, &ly.wk, &ly.bk, &ly.wv, &ly.bv, &ly.wo, &ly.bo,
                               &ly.ln1_g, &ly.ln1_b, &ly.w1, &ly.b1, &ly.w2, &ly.b2, &ly.ln2_g,
                               &ly.ln2_b}) {
            out.push_back(p);
        }
    }
    return out;
}

std::vector<const ParamTensor*> Encoder::params() const {
    auto mutable_params = const_cast<Encoder*>(this)->params();
    return {mutable_params.begin(), mutable_params.end()};
}

}  // namespace kglink
