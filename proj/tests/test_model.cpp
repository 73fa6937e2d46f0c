#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>

#include "gsum/model.hpp"
#include "gsum/optim.hpp"
#include "gsum/textproc.hpp"

using namespace gsum;

namespace {

GSumConfig tiny_config(int vocab = 12) {
    GSumConfig cfg;
    cfg.d_model = 16;
    cfg.n_heads = 2;
    cfg.d_ff = 32;
    cfg.n_enc = 2;
    cfg.n_dec = 2;
    cfg.vocab_size = vocab;
    cfg.max_src_len = 16;
    cfg.max_guid_len = 12;
    cfg.max_tgt_len = 10;
    cfg.dropout_rate = 0.0;
    return cfg;
}

std::vector<int> ids_of(std::initializer_list<int> list) { return std::vector<int>(list); }

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b, size_t limit) {
    double m = 0.0;
    for (size_t i = 0; i < limit; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("encoder output shapes and determinism") {
    GSumModel model(tiny_config(), 3);
    model.set_training(false);
    const auto ids = ids_of({5, 6, 7, 8});
    const KeyMask mask(4, 1);
    auto out1 = model.encode_source(ids, mask);
    CHECK(out1->rows() == 4);
    CHECK(out1->cols() == 16);
    auto out2 = model.encode_source(ids, mask);
    CHECK(out1->value == out2->value);  // bit-identical with dropout 0

    auto guid = model.encode_guidance(ids, mask);
    CHECK(guid->rows() == 4);
    CHECK(guid->cols() == 16);
}

TEST_CASE("guidance encoder shares the bottom, differs at the top") {
    auto cfg = tiny_config();
    GSumModel model(cfg, 4);
    model.set_training(false);
    const auto ids = ids_of({5, 6, 7});
    const KeyMask mask(3, 1);

    auto src = model.encode_source(ids, mask);
    auto guid = model.encode_guidance(ids, mask);
    CHECK(max_abs_diff(src->value, guid->value, src->numel()) > 1e-8);

    // Same objects on both encoder paths, not copies.
    CHECK(model.param("enc.shared.0.attn.wq").get() ==
          model.shared_layers()[0].attn.wq.get());

    // With identical top parameters the two streams coincide; perturbing one
    // guidance-top weight separates them again.
    GSumModel twin(cfg, 4);
    twin.set_training(false);
    for (const auto& [name, t] : twin.named_params()) {
        if (name.rfind("enc.guid_top.", 0) == 0)
            t->value = twin.param("enc.src_top." + name.substr(13))->value;
    }
    auto a = twin.encode_source(ids, mask);
    auto b = twin.encode_guidance(ids, mask);
    CHECK(max_abs_diff(a->value, b->value, a->numel()) == 0.0);
    twin.param("enc.guid_top.attn.wq")->value[0] += 0.25;
    auto c = twin.encode_guidance(ids, mask);
    CHECK(max_abs_diff(a->value, c->value, a->numel()) > 0.0);
}

TEST_CASE("padding invariance: masked pads leave real rows unchanged") {
    GSumModel model(tiny_config(), 5);
    model.set_training(false);
    const auto ids = ids_of({5, 6, 7});
    auto plain = model.encode_source(ids, KeyMask(3, 1));

    auto padded_ids = ids;
    padded_ids.push_back(Vocab::kPad);
    padded_ids.push_back(Vocab::kPad);
    KeyMask mask(5, 1);
    mask[3] = mask[4] = 0;
    auto padded = model.encode_source(padded_ids, mask);

    CHECK(max_abs_diff(plain->value, padded->value, plain->numel()) < 1e-10);

    // Cross-attention side: decoding against the padded source matches.
    const auto guid = ids_of({2, 5, 3});
    const KeyMask guid_mask(3, 1);
    auto guid_repr = model.encode_guidance(guid, guid_mask);
    const auto tgt = ids_of({2, 5, 6});
    auto logits_plain = model.decode(tgt, guid_repr, guid_mask, plain, KeyMask(3, 1));
    auto logits_padded = model.decode(tgt, guid_repr, guid_mask, padded, mask);
    CHECK(max_abs_diff(logits_plain->value, logits_padded->value, logits_plain->numel()) <
          1e-10);
}

TEST_CASE("causal masking: perturbing position t only changes logits at >= t") {
    GSumModel model(tiny_config(), 6);
    model.set_training(false);
    const auto src = ids_of({5, 6, 7, 8});
    const auto guid = ids_of({2, 5, 3});
    const KeyMask src_mask(4, 1), guid_mask(3, 1);
    auto src_repr = model.encode_source(src, src_mask);
    auto guid_repr = model.encode_guidance(guid, guid_mask);

    auto tgt = ids_of({2, 5, 6, 7, 8});
    auto base = model.decode(tgt, guid_repr, guid_mask, src_repr, src_mask);
    const int v = base->cols();
    for (size_t t = 1; t < tgt.size(); ++t) {
        auto perturbed = tgt;
        perturbed[t] = 9;
        auto logits = model.decode(perturbed, guid_repr, guid_mask, src_repr, src_mask);
        for (size_t row = 0; row < t; ++row)
            CHECK(max_abs_diff(
                      std::vector<double>(base->value.begin() + row * v,
                                          base->value.begin() + (row + 1) * v),
                      std::vector<double>(logits->value.begin() + row * v,
                                          logits->value.begin() + (row + 1) * v),
                      static_cast<size_t>(v)) == 0.0);
        CHECK(max_abs_diff(base->value, logits->value, base->numel()) > 0.0);
    }
    CHECK(base->rows() == static_cast<int>(tgt.size()));
    CHECK(base->cols() == model.config().vocab_size);
}

TEST_CASE("block order probe: either cross-attention can be silenced alone") {
    GSumModel model(tiny_config(), 7);
    model.set_training(false);
    const auto src = ids_of({5, 6, 7});
    const auto guid = ids_of({8, 9});
    const auto src2 = ids_of({5, 6, 10});
    const auto guid2 = ids_of({8, 11});
    const auto tgt = ids_of({2, 5});
    const KeyMask m3(3, 1), m2(2, 1);

    auto logits = [&](GSumModel& m, const std::vector<int>& s, const std::vector<int>& g) {
        auto sr = m.encode_source(s, KeyMask(s.size(), 1));
        auto gr = m.encode_guidance(g, KeyMask(g.size(), 1));
        return m.decode(tgt, gr, KeyMask(g.size(), 1), sr, KeyMask(s.size(), 1));
    };

    // Zero the source cross-attention: guidance changes must still matter.
    GSumModel no_src(tiny_config(), 7);
    no_src.set_training(false);
    for (const auto& [name, t] : no_src.named_params())
        if (name.find(".cross_src.") != std::string::npos)
            std::fill(t->value.begin(), t->value.end(), 0.0);
    auto g_base = logits(no_src, src, guid);
    auto g_changed = logits(no_src, src, guid2);
    CHECK(max_abs_diff(g_base->value, g_changed->value, g_base->numel()) > 1e-12);
    auto s_changed = logits(no_src, src2, guid);
    // Source still reaches the decoder only through the (zeroed) block's
    // value path: residual keeps it silent.
    CHECK(max_abs_diff(g_base->value, s_changed->value, g_base->numel()) == 0.0);

    // And the mirror image for the guidance cross-attention.
    GSumModel no_guid(tiny_config(), 7);
    no_guid.set_training(false);
    for (const auto& [name, t] : no_guid.named_params())
        if (name.find(".cross_guid.") != std::string::npos)
            std::fill(t->value.begin(), t->value.end(), 0.0);
    auto s_base = logits(no_guid, src, guid);
    auto s_resp = logits(no_guid, src2, guid);
    CHECK(max_abs_diff(s_base->value, s_resp->value, s_base->numel()) > 1e-12);
    auto g_silent = logits(no_guid, src, guid2);
    CHECK(max_abs_diff(s_base->value, g_silent->value, s_base->numel()) == 0.0);
}

TEST_CASE("parameter sharing: a guidance-only update moves the source path") {
    GSumModel model(tiny_config(), 8);
    const auto ids = ids_of({5, 6, 7});
    const KeyMask mask(3, 1);
    model.set_training(false);
    const auto before = model.encode_source(ids, mask)->value;
    const auto src_top_before = model.param("enc.src_top.attn.wq")->value;
    const auto shared_before = model.param("enc.shared.0.attn.wq")->value;

    model.set_training(true);
    Adam opt(model.parameters(), AdamConfig{1e-2});
    auto loss = sum(model.encode_guidance(ids, mask));
    backward(loss);
    opt.step();
    model.set_training(false);

    CHECK(model.param("enc.src_top.attn.wq")->value == src_top_before);
    CHECK(model.param("enc.shared.0.attn.wq")->value != shared_before);
    const auto after = model.encode_source(ids, mask)->value;
    CHECK(max_abs_diff(before, after, before.size()) > 0.0);
}

TEST_CASE("all parameter groups receive gradients on a generic batch") {
    GSumModel model(tiny_config(), 9);
    model.set_training(true);
    std::vector<GSumModel::BatchItem> batch{
        {ids_of({5, 6, 7, 8}), ids_of({2, 9, 3}), ids_of({2, 5, 9, 3})}};
    auto loss = model.loss(batch);
    backward(loss);
    for (const auto& [name, t] : model.named_params()) {
        REQUIRE_MESSAGE(!t->grad.empty(), name);
        double norm = 0.0;
        for (double g : t->grad) norm += g * g;
        CHECK_MESSAGE(norm > 0.0, name);
    }
}

TEST_CASE("uniform logits give ln(vocab) loss; smoothing floor holds") {
    auto cfg = tiny_config();
    GSumModel model(cfg, 10);
    model.set_training(false);
    std::fill(model.param("embedding")->value.begin(), model.param("embedding")->value.end(),
              0.0);
    std::vector<GSumModel::BatchItem> batch{
        {ids_of({1, 1, 1}), ids_of({2, 3}), ids_of({2, 5, 6, 3})}};
    auto loss = model.loss(batch);
    CHECK(loss->item() == doctest::Approx(std::log(double(cfg.vocab_size))).epsilon(1e-10));

    auto smooth_cfg = cfg;
    smooth_cfg.label_smoothing = 0.2;
    GSumModel smooth(smooth_cfg, 10);
    smooth.set_training(false);
    auto smooth_loss = smooth.loss(batch);
    const int v = cfg.vocab_size;
    const double q_true = 1.0 - 0.2 + 0.2 / v;
    const double q_other = 0.2 / v;
    const double floor =
        -(q_true * std::log(q_true) + (v - 1) * q_other * std::log(q_other));
    CHECK(smooth_loss->item() >= floor - 1e-12);

    std::vector<GSumModel::BatchItem> bad{{ids_of({1}), ids_of({2}), ids_of({2})}};
    CHECK_THROWS_AS(model.loss(bad), std::invalid_argument);
}

TEST_CASE("encoder rejects out-of-vocab ids and over-long inputs") {
    GSumModel model(tiny_config(), 11);
    CHECK_THROWS_AS(model.encode_source({12}, KeyMask(1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(model.encode_source(std::vector<int>(17, 1), KeyMask(17, 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(model.encode_source({1, 2}, KeyMask(3, 1)), std::invalid_argument);
}

TEST_CASE("gradient check on a d_model=16 model (spot groups)") {
    auto cfg = tiny_config();
    GSumModel model(cfg, 12);
    model.set_training(true);
    std::vector<GSumModel::BatchItem> batch{
        {ids_of({5, 6, 7}), ids_of({2, 8, 3}), ids_of({2, 5, 6, 3})}};

    auto forward = [&] { return model.loss(batch); };
    for (const auto& name :
         {"embedding", "enc.shared.0.attn.wq", "enc.shared.1.ffn.w1", "enc.src_top.attn.wk",
          "enc.guid_top.attn.wv", "dec.0.self.wq", "dec.0.cross_guid.wq",
          "dec.1.cross_src.wo", "dec.1.ffn.w2", "dec.0.ln_guid.gain"}) {
        auto t = model.param(name);
        t->zero_grad();
        auto loss = forward();
        backward(loss);
        const auto analytic = t->grad;
        REQUIRE_MESSAGE(!analytic.empty(), name);
        // Sample a handful of coordinates per group.
        std::mt19937_64 rng(99);
        std::uniform_int_distribution<size_t> pick(0, t->numel() - 1);
        for (int s = 0; s < 6; ++s) {
            const size_t i = pick(rng);
            const double orig = t->value[i];
            const double h = 1e-5;
            t->value[i] = orig + h;
            const double plus = forward()->item();
            t->value[i] = orig - h;
            const double minus = forward()->item();
            t->value[i] = orig;
            const double fd = (plus - minus) / (2 * h);
            const double rel =
                std::abs(analytic[i] - fd) / (std::abs(analytic[i]) + std::abs(fd) + 1e-6);
            CHECK_MESSAGE(rel < 1e-4, name << "[" << i << "]");
        }
        for (const auto& p : model.parameters()) p->zero_grad();
    }
}

TEST_CASE("beam=1 equals greedy argmax decoding") {
    GSumModel model(tiny_config(), 13);
    model.set_training(false);
    const auto src = ids_of({5, 6, 7, 8});
    const auto guid = ids_of({2, 9, 3});

    GSumModel::BeamParams params;
    params.beam = 1;
    params.max_len = 6;
    params.length_alpha = 0.0;
    const auto beam_out = model.beam_search(src, guid, params);

    // Greedy reference.
    NoGradGuard no_grad;
    const KeyMask src_mask(src.size(), 1), guid_mask(guid.size(), 1);
    auto src_repr = model.encode_source(src, src_mask);
    auto guid_repr = model.encode_guidance(guid, guid_mask);
    std::vector<int> seq{Vocab::kBos};
    std::vector<int> greedy;
    for (int step = 0; step < 6; ++step) {
        auto logits = model.decode(seq, guid_repr, guid_mask, src_repr, src_mask);
        const int v = logits->cols();
        const double* row = logits->value.data() + (logits->rows() - 1) * size_t(v);
        int best = -1;
        for (int tok = 0; tok < v; ++tok) {
            if (tok == Vocab::kBos || tok == Vocab::kPad) continue;
            if (best < 0 || row[tok] > row[best]) best = tok;
        }
        if (best == Vocab::kEos) break;
        greedy.push_back(best);
        seq.push_back(best);
    }
    CHECK(beam_out == greedy);
}

TEST_CASE("beam search matches exhaustive enumeration") {
    auto cfg = tiny_config(8);  // 5 specials + 3 words
    cfg.max_tgt_len = 6;
    GSumModel model(cfg, 202);
    model.set_training(false);
    const auto src = ids_of({5, 6, 7});
    const auto guid = ids_of({2, 6, 3});

    GSumModel::BeamParams params;
    params.beam = 4;
    params.max_len = 4;
    params.length_alpha = 0.7;
    const auto beam_out = model.beam_search(src, guid, params);

    // Exhaustive enumeration of every candidate sequence (no BOS/PAD,
    // terminated by EOS or cut at max_len), scored identically.
    NoGradGuard no_grad;
    const KeyMask src_mask(src.size(), 1), guid_mask(guid.size(), 1);
    auto src_repr = model.encode_source(src, src_mask);
    auto guid_repr = model.encode_guidance(guid, guid_mask);

    auto logprobs = [&](const std::vector<int>& gen) {
        std::vector<int> input{Vocab::kBos};
        input.insert(input.end(), gen.begin(), gen.end());
        auto logits = model.decode(input, guid_repr, guid_mask, src_repr, src_mask);
        const int v = logits->cols();
        std::vector<double> row(logits->value.end() - v, logits->value.end());
        double mx = row[0];
        for (double x : row) mx = std::max(mx, x);
        double lse = 0.0;
        for (double x : row) lse += std::exp(x - mx);
        lse = mx + std::log(lse);
        for (auto& x : row) x -= lse;
        return row;
    };

    double best_score = -1e300;
    std::vector<int> best_seq;
    auto consider = [&](const std::vector<int>& seq, double logp) {
        const double len = double(std::max<size_t>(1, seq.size()));
        const double score = logp / std::pow(len, params.length_alpha);
        std::vector<int> stripped = seq;
        if (!stripped.empty() && stripped.back() == Vocab::kEos) stripped.pop_back();
        if (score > best_score || (score == best_score && stripped < best_seq)) {
            best_score = score;
            best_seq = stripped;
        }
    };
    std::function<void(std::vector<int>&, double)> walk = [&](std::vector<int>& gen,
                                                              double logp) {
        if (static_cast<int>(gen.size()) == params.max_len) {
            consider(gen, logp);
            return;
        }
        const auto row = logprobs(gen);
        for (int tok = 0; tok < static_cast<int>(row.size()); ++tok) {
            if (tok == Vocab::kBos || tok == Vocab::kPad) continue;
            gen.push_back(tok);
            if (tok == Vocab::kEos)
                consider(gen, logp + row[tok]);
            else
                walk(gen, logp + row[tok]);
            gen.pop_back();
        }
    };
    std::vector<int> gen;
    walk(gen, 0.0);

    CHECK(beam_out == best_seq);
}

TEST_CASE("trigram blocking forbids repeats") {
    GSumModel model(tiny_config(), 17);
    model.set_training(false);
    GSumModel::BeamParams params;
    params.beam = 2;
    params.max_len = 9;
    params.block_repeat_trigram = true;
    const auto out =
        model.beam_search(ids_of({5, 6, 7, 8}), ids_of({2, 9, 3}), params);
    std::set<std::vector<int>> trigrams;
    for (size_t i = 0; i + 3 <= out.size(); ++i) {
        std::vector<int> tri(out.begin() + i, out.begin() + i + 3);
        CHECK(trigrams.insert(tri).second);
    }
}

TEST_CASE("checkpoint round trip is bit exact") {
    GSumModel model(tiny_config(), 18);
    model.set_training(false);
    const std::string path = "ckpt_test.bin";
    model.save_checkpoint(path);
    auto loaded = GSumModel::load_checkpoint(path);
    loaded.set_training(false);

    for (const auto& [name, t] : model.named_params())
        CHECK(loaded.param(name)->value == t->value);

    const auto ids = ids_of({5, 6, 7});
    const KeyMask mask(3, 1);
    CHECK(model.encode_source(ids, mask)->value ==
          loaded.encode_source(ids, mask)->value);
    std::remove(path.c_str());

    // Corrupt magic is rejected.
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("NOPE", f);
    std::fclose(f);
    CHECK_THROWS(GSumModel::load_checkpoint(path));
    std::remove(path.c_str());
}

TEST_CASE("config invariants") {
    auto cfg = tiny_config();
    cfg.n_heads = 3;  // does not divide 16
    CHECK_THROWS_AS(GSumModel(cfg, 1), std::invalid_argument);
    cfg = tiny_config();
    cfg.n_dec = 0;
    CHECK_THROWS_AS(GSumModel(cfg, 1), std::invalid_argument);
    cfg = tiny_config();
    cfg.vocab_size = 0;
    CHECK_THROWS_AS(GSumModel(cfg, 1), std::invalid_argument);
}
