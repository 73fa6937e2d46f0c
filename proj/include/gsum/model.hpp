#pragma once

#include <cstdint>
#include <utility>

#include "gsum/tensor.hpp"

namespace gsum {

struct GSumConfig {
    int d_model = 64;
    int n_heads = 4;
    int d_ff = 128;
    int n_enc = 2;  // shared bottom layers; each encoder has n_enc + 1 layers
    int n_dec = 2;
    int vocab_size = 0;
    int max_src_len = 128;
    int max_guid_len = 64;
    int max_tgt_len = 48;
    double dropout_rate = 0.1;
    double label_smoothing = 0.0;
    double ln_eps = 1e-6;

    void validate() const;
};

struct AttentionParams {
    TensorPtr wq, bq, wk, bk, wv, bv, wo, bo;
};

struct LayerNormParams {
    TensorPtr gain, bias;
};

struct FeedForwardParams {
    TensorPtr w1, b1, w2, b2;
};

struct EncoderLayer {
    AttentionParams attn;
    LayerNormParams ln_attn;
    FeedForwardParams ffn;
    LayerNormParams ln_ffn;
};

struct DecoderLayer {
    AttentionParams self_attn;
    LayerNormParams ln_self;
    AttentionParams cross_guid;
    LayerNormParams ln_guid;
    AttentionParams cross_src;
    LayerNormParams ln_src;
    FeedForwardParams ffn;
    LayerNormParams ln_ffn;
};

using KeyMask = std::vector<uint8_t>;  // 1 = real token, 0 = padding

// Per-head sliced attention with a shared additive mask, output projected
// back to d_model.
TensorPtr multi_head_attention(const TensorPtr& x_q, const TensorPtr& x_kv,
                               const TensorPtr& mask, const AttentionParams& p, int n_heads);

// Additive attention mask built from a key mask and optional causality:
// null when nothing is masked.
TensorPtr make_attention_mask(int q_len, const KeyMask& key_mask, bool causal);

// Guided summarization transformer. Source and guidance run through the
// same embedding table and the same bottom encoder layers (aliased
// parameter tensors, not copies) before splitting into per-stream top
// layers. Decoder layers attend to guidance first, then source. Output
// projection is the transposed embedding.
class GSumModel {
public:
    GSumModel(GSumConfig cfg, uint64_t seed);

    const GSumConfig& config() const { return cfg_; }

    TensorPtr encode_source(const std::vector<int>& ids, const KeyMask& mask) const;
    TensorPtr encode_guidance(const std::vector<int>& ids, const KeyMask& mask) const;

    // Causal self-attention, cross-attention over guidance, cross-attention
    // over source, feed-forward; post-norm residuals; tied vocab logits.
    TensorPtr decode(const std::vector<int>& tgt_ids, const TensorPtr& guid_repr,
                     const KeyMask& guid_mask, const TensorPtr& src_repr,
                     const KeyMask& src_mask) const;

    struct BatchItem {
        std::vector<int> src;
        std::vector<int> guid;
        std::vector<int> tgt;  // BOS ... EOS
    };

    // Mean NLL over all target positions of the batch (teacher forcing),
    // with the configured label smoothing.
    TensorPtr loss(const std::vector<BatchItem>& batch) const;

    struct BeamParams {
        int beam = 4;
        int max_len = 32;
        double length_alpha = 1.0;
        bool block_repeat_trigram = false;
    };

    // Length-normalized beam search: score = logprob / len^alpha with len
    // counting every generated token (EOS included when produced). Returns
    // the generated ids without BOS/EOS.
    std::vector<int> beam_search(const std::vector<int>& src_ids,
                                 const std::vector<int>& guid_ids,
                                 const BeamParams& params) const;

    void set_training(bool training) { training_ = training; }
    bool training() const { return training_; }

    const std::vector<std::pair<std::string, TensorPtr>>& named_params() const {
        return params_;
    }
    std::vector<TensorPtr> parameters() const;
    TensorPtr param(const std::string& name) const;

    const std::vector<EncoderLayer>& shared_layers() const { return shared_layers_; }
    const EncoderLayer& source_top() const { return src_top_; }
    const EncoderLayer& guidance_top() const { return guid_top_; }

    void save_checkpoint(const std::string& path) const;
    static GSumModel load_checkpoint(const std::string& path);

private:
    GSumConfig cfg_;
    mutable std::mt19937_64 rng_;
    bool training_ = true;

    TensorPtr embedding_;                 // [vocab x d_model]
    std::vector<double> positional_;      // sinusoidal table, longest stream
    std::vector<EncoderLayer> shared_layers_;
    EncoderLayer src_top_;
    EncoderLayer guid_top_;
    std::vector<DecoderLayer> dec_layers_;
    std::vector<std::pair<std::string, TensorPtr>> params_;

    TensorPtr embed(const std::vector<int>& ids) const;
    TensorPtr encoder_stack(const std::vector<int>& ids, const KeyMask& mask,
                            const EncoderLayer& top, int max_len, const char* what) const;
    TensorPtr apply_dropout(const TensorPtr& x) const;
    void register_params();
};

}  // namespace gsum
