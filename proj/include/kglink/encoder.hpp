#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "kglink/common.hpp"

namespace kglink {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using RowVec = Eigen::RowVectorXd;

struct ParamTensor {
    std::string name;
    Mat value;
    Mat grad;
    bool decay = false;

    void init(const std::string& n, int rows, int cols, bool use_decay) {
        name = n;
        value = Mat::Zero(rows, cols);
        grad = Mat::Zero(rows, cols);
        decay = use_decay;
    }
};

struct ModelDims {
    int vocab = 0;
    int dim = 64;
    int layers = 2;
    int heads = 4;
    int max_seq = 512;
    int ff_mult = 4;
    int labels = 0;

    int head_dim() const { return dim / heads; }
    int ff_dim() const { return dim * ff_mult; }
};

// Cached activations for one encoder layer, kept for the backward pass.
struct LayerTrace {
    Mat x_in;
    Mat q, k, v;
    std::vector<Mat> attn;  // per-head softmax probabilities, n x n
    Mat ctx;
    Mat attn_drop_mask;  // empty in eval mode
    Mat ln1_in, ln1_xhat;
    Vec ln1_inv_std;
    Mat x_mid;
    Mat ff_pre, ff_act;
    Mat ff_drop_mask;
    Mat ln2_in, ln2_xhat;
    Vec ln2_inv_std;
};

struct EncoderTrace {
    std::vector<int> ids;
    std::vector<unsigned char> key_allowed;
    bool allow_all_keys = false;
    Mat emb_drop_mask;
    Mat x0;
    std::vector<LayerTrace> layers;
};

// Transformer-style encoder: learned token + position embeddings, L layers
// of multi-head self-attention and GELU feed-forward with post-layer
// normalization. PAD tokens are excluded from attention as keys; a
// sequence with no real tokens falls back to attending everywhere so
// PAD-only inputs stay well defined.
class Encoder {
public:
    explicit Encoder(const ModelDims& dims);

    void init_weights(Rng& rng);

    // Returns an n x dim matrix, one row per position. When `trace` is
    // given the forward activations are cached for backward(). Dropout is
    // applied only when training is true and dropout > 0 (drop_rng required).
    Mat forward(const std::vector<int>& ids, bool training, double dropout, Rng* drop_rng,
                EncoderTrace* trace) const;

    // Accumulates parameter gradients; returns nothing (input gradients are
    // not needed, the chain stops at the embeddings).
    void backward(const EncoderTrace& trace, const Mat& d_out);

    std::vector<ParamTensor*> params();
    std::vector<const ParamTensor*> params() const;

    const ModelDims& dims() const { return dims_; }

private:
    struct Layer {
        ParamTensor wq, bq, wk, bk, wv, bv, wo, bo;
        ParamTensor ln1_g, ln1_b;
        ParamTensor w1, b1, w2, b2;
        ParamTensor ln2_g, ln2_b;
    };

    ModelDims dims_;
    ParamTensor tok_emb_;  // V x d
    ParamTensor pos_emb_;  // max_seq x d
    std::vector<Layer> layers_;

    friend struct EncoderAccess;
};

// Row-wise softmax helper shared with the heads.
void softmax_rows_inplace(Mat& m);
Vec softmax_vec(const Vec& z);

double gelu(double x);
double gelu_grad(double x);

}  // namespace kglink
