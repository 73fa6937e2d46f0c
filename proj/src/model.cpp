#include "gsum/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>

#include "gsum/textproc.hpp"

namespace gsum {

void GSumConfig::validate() const {
    if (d_model < 1 || n_heads < 1 || d_model % n_heads != 0)
        throw std::invalid_argument("GSumConfig: d_model must be divisible by n_heads");
    if (n_enc < 0 || n_dec < 1)
        throw std::invalid_argument("GSumConfig: need n_enc >= 0 and n_dec >= 1");
    if (vocab_size < 1) throw std::invalid_argument("GSumConfig: vocab_size unset");
    if (max_src_len < 1 || max_guid_len < 1 || max_tgt_len < 1)
        throw std::invalid_argument("GSumConfig: sequence limits must be >= 1");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
        throw std::invalid_argument("GSumConfig: dropout_rate must be in [0,1)");
    if (label_smoothing < 0.0 || label_smoothing >= 1.0)
        throw std::invalid_argument("GSumConfig: label_smoothing must be in [0,1)");
}

namespace {

TensorPtr xavier(std::vector<int> shape, std::mt19937_64& rng) {
    const double fan_in = shape[0];
    const double fan_out = shape.size() > 1 ? shape[1] : shape[0];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> unif(-bound, bound);
    size_t n = 1;
    for (int d : shape) n *= static_cast<size_t>(d);
    std::vector<double> values(n);
    for (auto& v : values) v = unif(rng);
    return Tensor::from_values(std::move(shape), std::move(values), true);
}

AttentionParams make_attention(int d, std::mt19937_64& rng) {
    AttentionParams p;
    p.wq = xavier({d, d}, rng);
    p.bq = Tensor::zeros({d}, true);
    p.wk = xavier({d, d}, rng);
    p.bk = Tensor::zeros({d}, true);
    p.wv = xavier({d, d}, rng);
    p.bv = Tensor::zeros({d}, true);
    p.wo = xavier({d, d}, rng);
    p.bo = Tensor::zeros({d}, true);
    return p;
}

LayerNormParams make_layer_norm(int d) {
    LayerNormParams p;
    p.gain = Tensor::from_values({d}, std::vector<double>(d, 1.0), true);
    p.bias = Tensor::zeros({d}, true);
    return p;
}

FeedForwardParams make_ffn(int d, int d_ff, std::mt19937_64& rng) {
    FeedForwardParams p;
    p.w1 = xavier({d, d_ff}, rng);
    p.b1 = Tensor::zeros({d_ff}, true);
    p.w2 = xavier({d_ff, d}, rng);
    p.b2 = Tensor::zeros({d}, true);
    return p;
}

EncoderLayer make_encoder_layer(const GSumConfig& cfg, std::mt19937_64& rng) {
    EncoderLayer l;
    l.attn = make_attention(cfg.d_model, rng);
    l.ln_attn = make_layer_norm(cfg.d_model);
    l.ffn = make_ffn(cfg.d_model, cfg.d_ff, rng);
    l.ln_ffn = make_layer_norm(cfg.d_model);
    return l;
}

DecoderLayer make_decoder_layer(const GSumConfig& cfg, std::mt19937_64& rng) {
    DecoderLayer l;
    l.self_attn = make_attention(cfg.d_model, rng);
    l.ln_self = make_layer_norm(cfg.d_model);
    l.cross_guid = make_attention(cfg.d_model, rng);
    l.ln_guid = make_layer_norm(cfg.d_model);
    l.cross_src = make_attention(cfg.d_model, rng);
    l.ln_src = make_layer_norm(cfg.d_model);
    l.ffn = make_ffn(cfg.d_model, cfg.d_ff, rng);
    l.ln_ffn = make_layer_norm(cfg.d_model);
    return l;
}

}  // namespace

// Additive attention mask: 0 for visible keys, kMaskValue otherwise.
TensorPtr make_attention_mask(int q_len, const KeyMask& key_mask, bool causal) {
    const int k_len = static_cast<int>(key_mask.size());
    bool all_visible = !causal;
    for (uint8_t m : key_mask)
        if (!m) all_visible = false;
    if (all_visible) return nullptr;
    std::vector<double> values(static_cast<size_t>(q_len) * k_len, 0.0);
    for (int i = 0; i < q_len; ++i)
        for (int j = 0; j < k_len; ++j)
            if (!key_mask[j] || (causal && j > i))
                values[static_cast<size_t>(i) * k_len + j] = kMaskValue;
    return Tensor::from_values({q_len, k_len}, std::move(values), false);
}

GSumModel::GSumModel(GSumConfig cfg, uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {
    cfg_.validate();
    const int d = cfg_.d_model;
    {
        std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
        std::vector<double> values(static_cast<size_t>(cfg_.vocab_size) * d);
        for (auto& v : values) v = normal(rng_);
        embedding_ = Tensor::from_values({cfg_.vocab_size, d}, std::move(values), true);
    }
    const int max_len =
        std::max(cfg_.max_src_len, std::max(cfg_.max_guid_len, cfg_.max_tgt_len));
    positional_.resize(static_cast<size_t>(max_len) * d);
    for (int pos = 0; pos < max_len; ++pos) {
        for (int i = 0; i < d; i += 2) {
            const double angle = pos / std::pow(10000.0, static_cast<double>(i) / d);
            positional_[static_cast<size_t>(pos) * d + i] = std::sin(angle);
            if (i + 1 < d) positional_[static_cast<size_t>(pos) * d + i + 1] = std::cos(angle);
        }
    }
    for (int i = 0; i < cfg_.n_enc; ++i) shared_layers_.push_back(make_encoder_layer(cfg_, rng_));
    src_top_ = make_encoder_layer(cfg_, rng_);
    guid_top_ = make_encoder_layer(cfg_, rng_);
    for (int i = 0; i < cfg_.n_dec; ++i) dec_layers_.push_back(make_decoder_layer(cfg_, rng_));
    register_params();
}

void GSumModel::register_params() {
    params_.clear();
    auto reg = [this](const std::string& name, const TensorPtr& t) {
        params_.emplace_back(name, t);
    };
    auto reg_attn = [&](const std::string& prefix, const AttentionParams& a) {
        reg(prefix + ".wq", a.wq);
        reg(prefix + ".bq", a.bq);
        reg(prefix + ".wk", a.wk);
        reg(prefix + ".bk", a.bk);
        reg(prefix + ".wv", a.wv);
        reg(prefix + ".bv", a.bv);
        reg(prefix + ".wo", a.wo);
        reg(prefix + ".bo", a.bo);
    };
    auto reg_ln = [&](const std::string& prefix, const LayerNormParams& l) {
        reg(prefix + ".gain", l.gain);
        reg(prefix + ".bias", l.bias);
    };
    auto reg_ffn = [&](const std::string& prefix, const FeedForwardParams& f) {
        reg(prefix + ".w1", f.w1);
        reg(prefix + ".b1", f.b1);
        reg(prefix + ".w2", f.w2);
        reg(prefix + ".b2", f.b2);
    };
    auto reg_enc = [&](const std::string& prefix, const EncoderLayer& l) {
        reg_attn(prefix + ".attn", l.attn);
        reg_ln(prefix + ".ln_attn", l.ln_attn);
        reg_ffn(prefix + ".ffn", l.ffn);
        reg_ln(prefix + ".ln_ffn", l.ln_ffn);
    };

    reg("embedding", embedding_);
    for (size_t i = 0; i < shared_layers_.size(); ++i)
        reg_enc("enc.shared." + std::to_string(i), shared_layers_[i]);
    reg_enc("enc.src_top", src_top_);
    reg_enc("enc.guid_top", guid_top_);
    for (size_t i = 0; i < dec_layers_.size(); ++i) {
        const std::string p = "dec." + std::to_string(i);
        reg_attn(p + ".self", dec_layers_[i].self_attn);
        reg_ln(p + ".ln_self", dec_layers_[i].ln_self);
        reg_attn(p + ".cross_guid", dec_layers_[i].cross_guid);
        reg_ln(p + ".ln_guid", dec_layers_[i].ln_guid);
        reg_attn(p + ".cross_src", dec_layers_[i].cross_src);
        reg_ln(p + ".ln_src", dec_layers_[i].ln_src);
        reg_ffn(p + ".ffn", dec_layers_[i].ffn);
        reg_ln(p + ".ln_ffn", dec_layers_[i].ln_ffn);
    }
}

std::vector<TensorPtr> GSumModel::parameters() const {
    std::vector<TensorPtr> out;
    out.reserve(params_.size());
    for (const auto& [name, t] : params_) out.push_back(t);
    return out;
}

TensorPtr GSumModel::param(const std::string& name) const {
    for (const auto& [n, t] : params_)
        if (n == name) return t;
    throw std::invalid_argument("GSumModel: unknown parameter " + name);
}

namespace {
// Worker threads building batch items in parallel draw dropout noise from
// their own stream instead of the model's.
thread_local std::mt19937_64* tls_dropout_rng = nullptr;
}  // namespace

TensorPtr GSumModel::apply_dropout(const TensorPtr& x) const {
    if (!training_ || cfg_.dropout_rate <= 0.0) return x;
    return dropout(x, cfg_.dropout_rate, tls_dropout_rng ? *tls_dropout_rng : rng_);
}

TensorPtr GSumModel::embed(const std::vector<int>& ids) const {
    const int d = cfg_.d_model;
    auto x = scale(embedding_lookup(embedding_, ids), std::sqrt(static_cast<double>(d)));
    std::vector<double> pos(positional_.begin(),
                            positional_.begin() + static_cast<size_t>(ids.size()) * d);
    auto pos_t = Tensor::from_values({static_cast<int>(ids.size()), d}, std::move(pos), false);
    return apply_dropout(add(x, pos_t));
}

TensorPtr multi_head_attention(const TensorPtr& x_q, const TensorPtr& x_kv,
                               const TensorPtr& mask, const AttentionParams& p, int n_heads) {
    auto q = linear(x_q, p.wq, p.bq);
    auto k = linear(x_kv, p.wk, p.bk);
    auto v = linear(x_kv, p.wv, p.bv);
    const int d = q->cols();
    const int dh = d / n_heads;
    std::vector<TensorPtr> heads;
    heads.reserve(static_cast<size_t>(n_heads));
    for (int h = 0; h < n_heads; ++h) {
        heads.push_back(attention(slice_cols(q, h * dh, dh), slice_cols(k, h * dh, dh),
                                  slice_cols(v, h * dh, dh), mask));
    }
    return linear(n_heads == 1 ? heads[0] : concat(heads, 1), p.wo, p.bo);
}

TensorPtr GSumModel::encoder_stack(const std::vector<int>& ids, const KeyMask& mask,
                                   const EncoderLayer& top, int max_len,
                                   const char* what) const {
    if (ids.empty()) throw std::invalid_argument(std::string(what) + ": empty input");
    if (static_cast<int>(ids.size()) > max_len)
        throw std::invalid_argument(std::string(what) + ": length " +
                                    std::to_string(ids.size()) + " exceeds limit " +
                                    std::to_string(max_len));
    if (mask.size() != ids.size())
        throw std::invalid_argument(std::string(what) + ": mask size mismatch");
    for (int id : ids)
        if (id < 0 || id >= cfg_.vocab_size)
            throw std::invalid_argument(std::string(what) + ": id " + std::to_string(id) +
                                        " out of vocabulary");
    auto x = embed(ids);
    const auto attn_mask = make_attention_mask(static_cast<int>(ids.size()), mask, false);
    auto run_layer = [&](const EncoderLayer& layer, TensorPtr h) {
        auto sub = multi_head_attention(h, h, attn_mask, layer.attn, cfg_.n_heads);
        h = layer_norm(add(h, apply_dropout(sub)), layer.ln_attn.gain, layer.ln_attn.bias,
                       cfg_.ln_eps);
        auto ff = linear(relu(linear(h, layer.ffn.w1, layer.ffn.b1)), layer.ffn.w2,
                         layer.ffn.b2);
        return layer_norm(add(h, apply_dropout(ff)), layer.ln_ffn.gain, layer.ln_ffn.bias,
                          cfg_.ln_eps);
    };
    for (const auto& layer : shared_layers_) x = run_layer(layer, x);
    return run_layer(top, x);
}

TensorPtr GSumModel::encode_source(const std::vector<int>& ids, const KeyMask& mask) const {
    return encoder_stack(ids, mask, src_top_, cfg_.max_src_len, "encode_source");
}

TensorPtr GSumModel::encode_guidance(const std::vector<int>& ids, const KeyMask& mask) const {
    return encoder_stack(ids, mask, guid_top_, cfg_.max_guid_len, "encode_guidance");
}

TensorPtr GSumModel::decode(const std::vector<int>& tgt_ids, const TensorPtr& guid_repr,
                            const KeyMask& guid_mask, const TensorPtr& src_repr,
                            const KeyMask& src_mask) const {
    if (tgt_ids.empty()) throw std::invalid_argument("decode: empty target");
    if (static_cast<int>(tgt_ids.size()) > cfg_.max_tgt_len)
        throw std::invalid_argument("decode: target length " + std::to_string(tgt_ids.size()) +
                                    " exceeds limit " + std::to_string(cfg_.max_tgt_len));
    const int t = static_cast<int>(tgt_ids.size());
    auto y = embed(tgt_ids);
    const auto causal = make_attention_mask(t, KeyMask(tgt_ids.size(), 1), true);
    const auto guid_attn_mask = make_attention_mask(t, guid_mask, false);
    const auto src_attn_mask = make_attention_mask(t, src_mask, false);
    for (const auto& layer : dec_layers_) {
        auto sub = multi_head_attention(y, y, causal, layer.self_attn, cfg_.n_heads);
        y = layer_norm(add(y, apply_dropout(sub)), layer.ln_self.gain, layer.ln_self.bias,
                       cfg_.ln_eps);
        sub = multi_head_attention(y, guid_repr, guid_attn_mask, layer.cross_guid,
                                   cfg_.n_heads);
        y = layer_norm(add(y, apply_dropout(sub)), layer.ln_guid.gain, layer.ln_guid.bias,
                       cfg_.ln_eps);
        sub = multi_head_attention(y, src_repr, src_attn_mask, layer.cross_src, cfg_.n_heads);
        y = layer_norm(add(y, apply_dropout(sub)), layer.ln_src.gain, layer.ln_src.bias,
                       cfg_.ln_eps);
        auto ff = linear(relu(linear(y, layer.ffn.w1, layer.ffn.b1)), layer.ffn.w2,
                         layer.ffn.b2);
        y = layer_norm(add(y, apply_dropout(ff)), layer.ln_ffn.gain, layer.ln_ffn.bias,
                       cfg_.ln_eps);
    }
    // Tied output projection: logits = y * embedding^T.
    return matmul_nt(y, embedding_);
}

TensorPtr GSumModel::loss(const std::vector<BatchItem>& batch) const {
    long long count = 0;
    for (const auto& item : batch) {
        if (item.tgt.size() < 2)
            throw std::invalid_argument("loss: target must be wrapped BOS ... EOS");
        count += static_cast<long long>(item.tgt.size()) - 1;
    }
    if (count == 0) throw std::invalid_argument("loss: batch has no target positions");

    // Forward graphs of distinct items only read the shared parameter
    // tensors, so they can be built concurrently; the reduction and the
    // later backward stay serial. Dropout seeds are drawn in batch order
    // up front to keep the run reproducible under any thread count.
    const long long n = static_cast<long long>(batch.size());
    std::vector<uint64_t> seeds(batch.size(), 0);
    const bool needs_noise = training_ && cfg_.dropout_rate > 0.0;
    if (needs_noise)
        for (auto& s : seeds) s = rng_();
    std::vector<TensorPtr> nlls(batch.size());
    std::exception_ptr failure;
    const bool grad_mode = grad_enabled();
#pragma omp parallel for schedule(dynamic) if (n > 1)
    for (long long i = 0; i < n; ++i) {
        try {
            GradModeScope scope(grad_mode);
            std::mt19937_64 item_rng(seeds[static_cast<size_t>(i)]);
            tls_dropout_rng = needs_noise ? &item_rng : nullptr;
            const auto& item = batch[static_cast<size_t>(i)];
            const KeyMask src_mask(item.src.size(), 1);
            const KeyMask guid_mask(item.guid.size(), 1);
            auto src_repr = encode_source(item.src, src_mask);
            auto guid_repr = encode_guidance(item.guid, guid_mask);
            std::vector<int> input(item.tgt.begin(), item.tgt.end() - 1);
            std::vector<int> targets(item.tgt.begin() + 1, item.tgt.end());
            auto logits = decode(input, guid_repr, guid_mask, src_repr, src_mask);
            nlls[static_cast<size_t>(i)] = token_nll(logits, targets, cfg_.label_smoothing);
            tls_dropout_rng = nullptr;
        } catch (...) {
            tls_dropout_rng = nullptr;
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    TensorPtr total;
    for (const auto& nll : nlls) total = total ? add(total, nll) : nll;
    return scale(total, 1.0 / static_cast<double>(count));
}

std::vector<int> GSumModel::beam_search(const std::vector<int>& src_ids,
                                        const std::vector<int>& guid_ids,
                                        const BeamParams& params) const {
    if (params.beam < 1) throw std::invalid_argument("beam_search: beam must be >= 1");
    NoGradGuard no_grad;

    const KeyMask src_mask(src_ids.size(), 1);
    const KeyMask guid_mask(guid_ids.size(), 1);
    const auto src_repr = encode_source(src_ids, src_mask);
    const auto guid_repr = encode_guidance(guid_ids, guid_mask);

    struct Beam {
        std::vector<int> tokens;  // generated, BOS excluded
        double logp = 0.0;
    };
    auto norm_score = [&](const Beam& b) {
        const double len = static_cast<double>(std::max<size_t>(1, b.tokens.size()));
        return b.logp / std::pow(len, params.length_alpha);
    };
    auto repeats_trigram = [](const std::vector<int>& tokens) {
        if (tokens.size() < 3) return false;
        const size_t last = tokens.size() - 3;
        for (size_t i = 0; i < last; ++i)
            if (tokens[i] == tokens[last] && tokens[i + 1] == tokens[last + 1] &&
                tokens[i + 2] == tokens[last + 2])
                return true;
        return false;
    };

    const int max_len = std::min(params.max_len, cfg_.max_tgt_len - 1);
    std::vector<Beam> alive{Beam{}};
    std::vector<Beam> finished;

    for (int step = 0; step < max_len && !alive.empty(); ++step) {
        struct Candidate {
            double logp;
            int parent;
            int token;
        };
        std::vector<Candidate> candidates;
        for (size_t b = 0; b < alive.size(); ++b) {
            std::vector<int> input;
            input.reserve(alive[b].tokens.size() + 1);
            input.push_back(Vocab::kBos);
            input.insert(input.end(), alive[b].tokens.begin(), alive[b].tokens.end());
            auto logits = decode(input, guid_repr, guid_mask, src_repr, src_mask);
            const int v = logits->cols();
            const double* row =
                logits->value.data() + static_cast<size_t>(logits->rows() - 1) * v;
            double mx = row[0];
            for (int j = 1; j < v; ++j) mx = row[j] > mx ? row[j] : mx;
            double lse = 0.0;
            for (int j = 0; j < v; ++j) lse += std::exp(row[j] - mx);
            lse = mx + std::log(lse);
            for (int tok = 0; tok < v; ++tok) {
                if (tok == Vocab::kBos || tok == Vocab::kPad) continue;
                candidates.push_back({alive[b].logp + row[tok] - lse,
                                      static_cast<int>(b), tok});
            }
        }
        std::sort(candidates.begin(), candidates.end(),
                  [](const Candidate& a, const Candidate& b) {
                      if (a.logp != b.logp) return a.logp > b.logp;
                      if (a.parent != b.parent) return a.parent < b.parent;
                      return a.token < b.token;
                  });
        // Standard beam semantics: the top `beam` candidates are kept and an
        // EOS candidate consumes its slot as a finished hypothesis. With
        // beam = 1 this reduces exactly to greedy argmax decoding.
        std::vector<Beam> next;
        int accepted = 0;
        for (const auto& c : candidates) {
            if (accepted >= params.beam) break;
            Beam b = alive[static_cast<size_t>(c.parent)];
            b.tokens.push_back(c.token);
            b.logp = c.logp;
            if (params.block_repeat_trigram && repeats_trigram(b.tokens)) continue;
            ++accepted;
            if (c.token == Vocab::kEos)
                finished.push_back(std::move(b));
            else
                next.push_back(std::move(b));
        }
        alive.swap(next);
    }
    for (auto& b : alive) finished.push_back(std::move(b));
    if (finished.empty()) return {};

    const Beam* best = &finished[0];
    for (const auto& b : finished) {
        const double s = norm_score(b), sb = norm_score(*best);
        if (s > sb || (s == sb && b.tokens < best->tokens)) best = &b;
    }
    std::vector<int> out = best->tokens;
    if (!out.empty() && out.back() == Vocab::kEos) out.pop_back();
    return out;
}

// ---------------------------------------------------------------------------
// Checkpoints: magic "GSUM", version, config, then (name, shared flag,
// shape, row-major f64 little-endian values) per parameter. Shared bottom
// layers appear once, flagged.

namespace {

constexpr char kCkptMagic[4] = {'G', 'S', 'U', 'M'};
constexpr uint32_t kCkptVersion = 1;

void write_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void write_u64(std::ostream& os, uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void write_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

void write_str(std::ostream& os, const std::string& s) {
    write_u32(os, static_cast<uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

uint32_t read_u32(std::istream& is) {
    uint32_t v;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}

uint64_t read_u64(std::istream& is) {
    uint64_t v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

double read_f64(std::istream& is) {
    double v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

std::string read_str(std::istream& is) {
    const uint32_t len = read_u32(is);
    std::string s(len, '\0');
    is.read(s.data(), len);
    return s;
}

}  // namespace

void GSumModel::save_checkpoint(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_checkpoint: cannot open " + path);
    f.write(kCkptMagic, 4);
    write_u32(f, kCkptVersion);
    write_u32(f, static_cast<uint32_t>(cfg_.d_model));
    write_u32(f, static_cast<uint32_t>(cfg_.n_heads));
    write_u32(f, static_cast<uint32_t>(cfg_.d_ff));
    write_u32(f, static_cast<uint32_t>(cfg_.n_enc));
    write_u32(f, static_cast<uint32_t>(cfg_.n_dec));
    write_u32(f, static_cast<uint32_t>(cfg_.vocab_size));
    write_u32(f, static_cast<uint32_t>(cfg_.max_src_len));
    write_u32(f, static_cast<uint32_t>(cfg_.max_guid_len));
    write_u32(f, static_cast<uint32_t>(cfg_.max_tgt_len));
    write_f64(f, cfg_.dropout_rate);
    write_f64(f, cfg_.label_smoothing);
    write_f64(f, cfg_.ln_eps);
    write_u64(f, params_.size());
    for (const auto& [name, t] : params_) {
        write_str(f, name);
        f.put(name.rfind("enc.shared.", 0) == 0 ? 1 : 0);
        write_u32(f, static_cast<uint32_t>(t->shape.size()));
        for (int d : t->shape) write_u32(f, static_cast<uint32_t>(d));
        f.write(reinterpret_cast<const char*>(t->value.data()),
                static_cast<std::streamsize>(sizeof(double) * t->numel()));
    }
    if (!f) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

GSumModel GSumModel::load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_checkpoint: cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::string(magic, 4) != std::string(kCkptMagic, 4))
        throw std::runtime_error("load_checkpoint: bad magic in " + path);
    const uint32_t version = read_u32(f);
    if (version != kCkptVersion)
        throw std::runtime_error("load_checkpoint: unsupported version " +
                                 std::to_string(version));
    GSumConfig cfg;
    cfg.d_model = static_cast<int>(read_u32(f));
    cfg.n_heads = static_cast<int>(read_u32(f));
    cfg.d_ff = static_cast<int>(read_u32(f));
    cfg.n_enc = static_cast<int>(read_u32(f));
    cfg.n_dec = static_cast<int>(read_u32(f));
    cfg.vocab_size = static_cast<int>(read_u32(f));
    cfg.max_src_len = static_cast<int>(read_u32(f));
    cfg.max_guid_len = static_cast<int>(read_u32(f));
    cfg.max_tgt_len = static_cast<int>(read_u32(f));
    cfg.dropout_rate = read_f64(f);
    cfg.label_smoothing = read_f64(f);
    cfg.ln_eps = read_f64(f);

    GSumModel model(cfg, 0);
    const uint64_t count = read_u64(f);
    std::set<std::string> seen;
    for (uint64_t i = 0; i < count; ++i) {
        const std::string name = read_str(f);
        f.get();  // shared flag, implied by the name
        const uint32_t ndim = read_u32(f);
        std::vector<int> shape(ndim);
        for (auto& d : shape) d = static_cast<int>(read_u32(f));
        TensorPtr t = model.param(name);
        if (t->shape != shape)
            throw std::runtime_error("load_checkpoint: shape mismatch for " + name);
        f.read(reinterpret_cast<char*>(t->value.data()),
               static_cast<std::streamsize>(sizeof(double) * t->numel()));
        seen.insert(name);
    }
    if (!f) throw std::runtime_error("load_checkpoint: truncated file " + path);
    if (seen.size() != model.params_.size())
        throw std::runtime_error("load_checkpoint: missing parameters in " + path);
    return model;
}

}  // namespace gsum
