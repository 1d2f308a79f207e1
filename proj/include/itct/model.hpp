#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "itct/dataset.hpp"
#include "itct/nn.hpp"
#include "itct/tensor.hpp"

namespace itct {

struct ModelConfig {
    int embedding_dim = 16;  // d
    int n_blocks = 4;
    int n_heads = 4;
    std::vector<double> mlp_hidden_factors = {2.0, 1.0};
    double dropout = 0.2;
    int m = 0;  // categorical feature count
    int c = 0;  // continuous feature count
    std::vector<int32_t> vocab_sizes;  // per categorical column, UNK included
    double layer_norm_eps = 1e-6;

    void validate() const;
    int fused_width() const { return embedding_dim * m + c; }
    std::vector<int> head_widths() const;  // hidden widths, floor(factor * fused_width)
};

template <class T>
struct TransformerBlockT {
    nn::AttentionWeights<T> attn;
    ParamTensor<T> norm1_gamma, norm1_beta;
    ParamTensor<T> ffn_w, ffn_b;  // one hidden layer of width d, GELU
    ParamTensor<T> norm2_gamma, norm2_beta;
};

template <class T>
struct HeadLayerT {
    ParamTensor<T> w, b;
};

// Per-stage intermediates for debugging and composition checks.
template <class T>
struct ForwardTrace {
    Mat<T> embeddings;  // (B*m) x d
    Mat<T> contextual;  // (B*m) x d, transformer output
    Mat<T> fused;       // B x (d*m + c)
    Mat<T> probs;       // B x 1
};

template <class T>
class ItctModelT {
  public:
    ItctModelT() = default;
    ItctModelT(const ModelConfig& config, const Vocabulary& vocab, uint64_t seed);
    explicit ItctModelT(const ModelConfig& config, uint64_t seed);

    const ModelConfig& config() const { return cfg_; }

    std::vector<ParamTensor<T>*> params();
    std::vector<const ParamTensor<T>*> params() const;
    void zero_grads();
    int64_t count_params() const;
    std::vector<std::pair<std::string, int64_t>> param_breakdown() const;

    // Probabilities in (0,1). Train mode caches activations for backward and
    // applies dropout driven by dropout_seed; eval mode is deterministic and
    // leaves no cache.
    Mat<T> forward(const Batch& batch, bool train_mode, uint64_t dropout_seed, ForwardTrace<T>* trace = nullptr);
    Mat<T> forward_eval(const Batch& batch) const;

    // dprob is dL/dprob (B x 1); accumulates into every ParamTensor's grad.
    void backward(const Mat<T>& dprob);

    // direct access for serialization and inspection
    const std::vector<ParamTensor<T>>& embedding_tables() const { return embed_tables_; }
    const ParamTensor<T>& column_identifiers() const { return column_ids_; }
    std::vector<ParamTensor<T>>& mutable_embedding_tables() { return embed_tables_; }
    ParamTensor<T>& mutable_column_identifiers() { return column_ids_; }
    std::vector<TransformerBlockT<T>>& blocks() { return blocks_; }
    const std::vector<TransformerBlockT<T>>& blocks() const { return blocks_; }
    std::vector<HeadLayerT<T>>& head() { return head_; }
    const std::vector<HeadLayerT<T>>& head() const { return head_; }
    ParamTensor<T>& cont_norm_gamma() { return cont_gamma_; }
    ParamTensor<T>& cont_norm_beta() { return cont_beta_; }

    template <class U>
    ItctModelT<U> cast() const;

  private:
    struct BlockCache {
        nn::AttentionCache<T> attn;
        Mat<T> norm1_in;
        nn::LayerNormCache<T> norm1;
        Mat<T> norm1_out;
        Mat<T> ffn_pre;  // pre-activation
        Mat<T> ffn_mask;
        Mat<T> norm2_in;
        nn::LayerNormCache<T> norm2;
    };
    struct Cache {
        std::vector<int32_t> cat;  // token ids used by the embedding scatter
        size_t batch_n = 0;
        Mat<T> embeddings;
        std::vector<BlockCache> blocks;
        Mat<T> cont_in;
        nn::LayerNormCache<T> cont_norm;
        Mat<T> fused;
        std::vector<Mat<T>> head_in;    // input to each head layer
        std::vector<Mat<T>> head_pre;   // pre-activation per hidden layer
        std::vector<Mat<T>> head_mask;  // dropout masks per hidden layer
        Mat<T> logits;
        Mat<T> probs;
        bool valid = false;
    };

    Mat<T> run_forward(const Batch& batch, bool train_mode, uint64_t dropout_seed, Cache* cache,
                       ForwardTrace<T>* trace) const;

    ModelConfig cfg_;
    std::vector<ParamTensor<T>> embed_tables_;  // per column: vocab x (d-1)
    ParamTensor<T> column_ids_;                 // m x 1
    std::vector<TransformerBlockT<T>> blocks_;
    ParamTensor<T> cont_gamma_, cont_beta_;  // 1 x c when c > 0
    std::vector<HeadLayerT<T>> head_;
    Cache cache_;
};

using ItctModel = ItctModelT<float>;

// Mean binary cross-entropy with probabilities clamped to [1e-7, 1-1e-7].
template <class T>
double bce_loss(const Mat<T>& probs, const std::vector<uint8_t>& labels);
template <class T>
Mat<T> bce_loss_backward(const Mat<T>& probs, const std::vector<uint8_t>& labels);

// ---------------------------------------------------------------------------
// model file: magic "ITCTM1", JSON manifest, raw float32 sections, CRC32

struct ModelBundle {
    ItctModel model;
    Vocabulary vocab;             // selected categorical columns
    NormalizationStats stats;     // selected continuous columns
    std::vector<FeatureRef> features;  // schema-ordered selected features
    int epochs_ran = 0;
    std::string stop_reason = "untrained";
    uint64_t seed = 0;
};

void save_model(const ModelBundle& bundle, const std::string& path);
ModelBundle load_model(const std::string& path);

}  // namespace itct
