#include "gsum/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include <json.hpp>

namespace gsum {

using nlohmann::json;

Regime regime_from_string(const std::string& name) {
    if (name == "oracle") return Regime::oracle;
    if (name == "auto" || name == "automatic") return Regime::automatic;
    throw std::invalid_argument("unknown regime: " + name);
}

std::string to_string(Regime regime) {
    return regime == Regime::oracle ? "oracle" : "auto";
}

std::unique_ptr<RetrievalIndex> build_index_for(const Corpus& train, GuidanceKind kind,
                                                Regime regime, const Bm25Params& params) {
    if (kind != GuidanceKind::retrieved) return nullptr;
    const IndexField field =
        regime == Regime::oracle ? IndexField::summary : IndexField::document;
    return std::make_unique<RetrievalIndex>(RetrievalIndex::build(train, field, params));
}

PreparedExample prepare_example(const Example& ex, const Vocab& vocab, Regime regime,
                                GuidanceKind kind, const GuidanceConfig& gcfg,
                                const GSumConfig& mcfg, const RetrievalIndex* index,
                                const GuidanceSignal* override_signal) {
    PreparedExample out;

    GuidanceSignal signal;
    if (override_signal) {
        signal = *override_signal;
    } else if (regime == Regime::oracle) {
        signal = oracle_guidance(ex, index, kind, gcfg);
    } else {
        signal = auto_guidance(ex.document, index, kind, gcfg,
                               ex.triples ? &*ex.triples : nullptr);
    }
    out.guid = render_guidance(signal, vocab, mcfg.max_guid_len);
    out.guidance_text = join_tokens(guidance_tokens(signal));

    Tokens doc_tokens = ex.document.all_tokens();
    if (static_cast<int>(doc_tokens.size()) > mcfg.max_src_len)
        doc_tokens.resize(static_cast<size_t>(mcfg.max_src_len));
    out.src = vocab.encode(doc_tokens);
    if (out.src.empty()) out.src.push_back(Vocab::kEos);

    Tokens ref = ex.reference;
    if (static_cast<int>(ref.size()) > mcfg.max_tgt_len - 2)
        ref.resize(static_cast<size_t>(mcfg.max_tgt_len - 2));
    out.tgt.push_back(Vocab::kBos);
    for (int id : vocab.encode(ref)) out.tgt.push_back(id);
    out.tgt.push_back(Vocab::kEos);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

double validation_loss(const GSumModel& model, const std::vector<PreparedExample>& prepared) {
    NoGradGuard no_grad;
    double total = 0.0;
    long long count = 0;
    for (const auto& p : prepared) {
        std::vector<GSumModel::BatchItem> batch{{p.src, p.guid, p.tgt}};
        auto loss = model.loss(batch);
        const long long n = static_cast<long long>(p.tgt.size()) - 1;
        total += loss->item() * static_cast<double>(n);
        count += n;
    }
    return count > 0 ? total / static_cast<double>(count) : 0.0;
}

}  // namespace

TrainResult train(const ExperimentSpec& spec, const Corpus& train_corpus,
                  const Corpus& valid_corpus) {
    if (train_corpus.empty()) throw TrainError(0, "train: empty training corpus");
    for (const auto& ex : train_corpus)
        if (ex.reference.empty())
            throw TrainError(0, "train: example " + ex.document.id + " has no reference");
    spec.guidance.validate();

    TrainResult result;
    result.vocab = Vocab::build(train_corpus, spec.vocab_min_freq, spec.vocab_max_size);

    GSumConfig mcfg = spec.model;
    mcfg.vocab_size = result.vocab.size();
    auto model = std::make_shared<GSumModel>(mcfg, spec.seed);
    model->set_training(true);

    const auto index = build_index_for(train_corpus, spec.guidance_kind, spec.train_regime,
                                       spec.guidance.bm25);

    std::vector<PreparedExample> train_prepared;
    train_prepared.reserve(train_corpus.size());
    for (const auto& ex : train_corpus)
        train_prepared.push_back(prepare_example(ex, result.vocab, spec.train_regime,
                                                 spec.guidance_kind, spec.guidance, mcfg,
                                                 index.get()));
    std::vector<PreparedExample> valid_prepared;
    valid_prepared.reserve(valid_corpus.size());
    for (const auto& ex : valid_corpus)
        valid_prepared.push_back(prepare_example(ex, result.vocab, spec.train_regime,
                                                 spec.guidance_kind, spec.guidance, mcfg,
                                                 index.get()));

    Adam optimizer(model->parameters(),
                   AdamConfig{spec.optim.lr, spec.optim.beta1, spec.optim.beta2,
                              spec.optim.eps});

    std::mt19937_64 shuffle_rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<size_t> order(train_prepared.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    size_t cursor = order.size();  // forces a shuffle at step 1

    std::vector<std::vector<double>> best_params;
    result.best_val_loss = std::numeric_limits<double>::infinity();

    auto validate_now = [&](long long step, TrainLogRecord& record) {
        if (valid_prepared.empty()) return;
        model->set_training(false);
        const double val = validation_loss(*model, valid_prepared);
        model->set_training(true);
        record.val_loss = val;
        if (val < result.best_val_loss) {
            result.best_val_loss = val;
            result.best_step = step;
            best_params.clear();
            for (const auto& p : model->parameters()) best_params.push_back(p->value);
        }
    };

    for (long long step = 1; step <= spec.max_steps; ++step) {
        std::vector<GSumModel::BatchItem> batch;
        for (int b = 0; b < spec.optim.batch_size; ++b) {
            if (cursor >= order.size()) {
                for (size_t i = order.size() - 1; i > 0; --i) {
                    std::uniform_int_distribution<size_t> pick(0, i);
                    std::swap(order[i], order[pick(shuffle_rng)]);
                }
                cursor = 0;
            }
            const auto& p = train_prepared[order[cursor++]];
            batch.push_back({p.src, p.guid, p.tgt});
        }
        auto loss = model->loss(batch);
        const double loss_value = loss->item();
        if (!std::isfinite(loss_value))
            throw TrainError(step, "train: non-finite loss at step " + std::to_string(step));
        backward(loss);
        optimizer.step();

        TrainLogRecord record;
        record.step = step;
        record.loss = loss_value;
        if (spec.eval_every > 0 && (step % spec.eval_every == 0 || step == spec.max_steps))
            validate_now(step, record);
        result.log.push_back(std::move(record));
    }

    if (!best_params.empty()) {
        auto params = model->parameters();
        for (size_t i = 0; i < params.size(); ++i) params[i]->value = best_params[i];
    }
    model->set_training(false);
    result.model = model;
    return result;
}

void write_train_log(const std::vector<TrainLogRecord>& log, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_train_log: cannot open " + path);
    for (const auto& r : log) {
        json record;
        record["step"] = r.step;
        record["loss"] = r.loss;
        if (r.val_loss) record["val_loss"] = *r.val_loss;
        if (r.val_rouge1) record["val_rouge1"] = *r.val_rouge1;
        f << record.dump() << '\n';
    }
}

// ---------------------------------------------------------------------------

EvalResult evaluate(const GSumModel& model, const Vocab& vocab, const Corpus& corpus,
                    Regime regime, GuidanceKind kind, const GuidanceConfig& gcfg,
                    const RetrievalIndex* index, const GSumModel::BeamParams& beam,
                    const GuidanceOverrides* overrides, const std::string& corpus_tag) {
    if (model.training())
        throw std::logic_error("evaluate: model must be in eval mode");
    if (vocab.size() != model.config().vocab_size)
        throw std::invalid_argument("evaluate: vocabulary size " +
                                    std::to_string(vocab.size()) +
                                    " does not match checkpoint vocab_size " +
                                    std::to_string(model.config().vocab_size));
    EvalResult result;
    result.records.resize(corpus.size());

    const long long n = static_cast<long long>(corpus.size());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
        const Example& ex = corpus[static_cast<size_t>(i)];
        const GuidanceSignal* override_signal = nullptr;
        if (overrides) {
            auto it = overrides->find(ex.document.id);
            if (it != overrides->end()) override_signal = &it->second;
        }
        const auto prepared = prepare_example(ex, vocab, regime, kind, gcfg, model.config(),
                                              index, override_signal);
        const auto output_ids = model.beam_search(prepared.src, prepared.guid, beam);
        const Tokens output = vocab.decode(output_ids);

        EvalRecord rec;
        rec.id = ex.document.id;
        rec.guidance_text = prepared.guidance_text;
        rec.output_text = join_tokens(output);
        rec.r1 = rouge_n(output, ex.reference, 1).f1;
        rec.r2 = rouge_n(output, ex.reference, 2).f1;
        rec.rl = rouge_l(output, ex.reference).f1;
        rec.corpus_tag = corpus_tag;
        result.records[static_cast<size_t>(i)] = std::move(rec);
    }

    std::vector<RougeScore> r1s, r2s, rls;
    for (const auto& rec : result.records) {
        r1s.push_back(RougeScore{0, 0, rec.r1});
        r2s.push_back(RougeScore{0, 0, rec.r2});
        rls.push_back(RougeScore{0, 0, rec.rl});
    }
    result.r1 = mean_rouge(r1s);
    result.r2 = mean_rouge(r2s);
    result.rl = mean_rouge(rls);
    return result;
}

void write_eval_records(const EvalResult& result, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_eval_records: cannot open " + path);
    for (const auto& r : result.records) {
        json record;
        record["id"] = r.id;
        record["guidance"] = r.guidance_text;
        record["output"] = r.output_text;
        record["r1"] = r.r1;
        record["r2"] = r.r2;
        record["rl"] = r.rl;
        if (!r.corpus_tag.empty()) record["corpus"] = r.corpus_tag;
        f << record.dump() << '\n';
    }
    json summary;
    summary["corpus_r1"] = result.r1.f1;
    summary["corpus_r2"] = result.r2.f1;
    summary["corpus_rl"] = result.rl.f1;
    f << summary.dump() << '\n';
}

double token_accuracy(const GSumModel& model, const Vocab& vocab, const Corpus& corpus,
                      Regime regime, GuidanceKind kind, const GuidanceConfig& gcfg,
                      const RetrievalIndex* index) {
    NoGradGuard no_grad;
    long long correct = 0, total = 0;
    for (const auto& ex : corpus) {
        const auto p = prepare_example(ex, vocab, regime, kind, gcfg, model.config(), index);
        const KeyMask src_mask(p.src.size(), 1), guid_mask(p.guid.size(), 1);
        auto src_repr = model.encode_source(p.src, src_mask);
        auto guid_repr = model.encode_guidance(p.guid, guid_mask);
        std::vector<int> input(p.tgt.begin(), p.tgt.end() - 1);
        std::vector<int> targets(p.tgt.begin() + 1, p.tgt.end());
        auto logits = model.decode(input, guid_repr, guid_mask, src_repr, src_mask);
        const int v = logits->cols();
        for (size_t t = 0; t < targets.size(); ++t) {
            const double* row = logits->value.data() + t * static_cast<size_t>(v);
            int argmax = 0;
            for (int j = 1; j < v; ++j)
                if (row[j] > row[argmax]) argmax = j;
            if (argmax == targets[t]) ++correct;
            ++total;
        }
    }
    return total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

double corpus_loss(const GSumModel& model, const Vocab& vocab, const Corpus& corpus,
                   Regime regime, GuidanceKind kind, const GuidanceConfig& gcfg,
                   const RetrievalIndex* index) {
    std::vector<PreparedExample> prepared;
    prepared.reserve(corpus.size());
    for (const auto& ex : corpus)
        prepared.push_back(prepare_example(ex, vocab, regime, kind, gcfg, model.config(),
                                           index));
    return validation_loss(model, prepared);
}

RegimeGridResult regime_grid(const ExperimentSpec& spec, const Corpus& train_corpus,
                             const Corpus& valid_corpus, const Corpus& test_corpus) {
    RegimeGridResult grid;
    const Regime regimes[2] = {Regime::oracle, Regime::automatic};
    for (int tr = 0; tr < 2; ++tr) {
        ExperimentSpec cell_spec = spec;
        cell_spec.train_regime = regimes[tr];
        auto trained = train(cell_spec, train_corpus, valid_corpus);
        for (int te = 0; te < 2; ++te) {
            const auto index = build_index_for(train_corpus, spec.guidance_kind, regimes[te],
                                               spec.guidance.bm25);
            grid.cell[tr][te] =
                evaluate(*trained.model, trained.vocab, test_corpus, regimes[te],
                         spec.guidance_kind, spec.guidance, index.get(), spec.beam);
        }
    }
    return grid;
}

EvalResult cross_corpus_eval(const GSumModel& model, const Vocab& vocab_from_a,
                             const Corpus& corpus_b, Regime regime, GuidanceKind kind,
                             const GuidanceConfig& gcfg, const RetrievalIndex* index,
                             const GSumModel::BeamParams& beam, const std::string& tag) {
    return evaluate(model, vocab_from_a, corpus_b, regime, kind, gcfg, index, beam, nullptr,
                    tag);
}

}  // namespace gsum
