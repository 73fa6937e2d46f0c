#pragma once

#include <map>
#include <memory>
#include <optional>

#include "gsum/bm25.hpp"
#include "gsum/corpus.hpp"
#include "gsum/guidance.hpp"
#include "gsum/model.hpp"
#include "gsum/optim.hpp"
#include "gsum/rouge.hpp"

namespace gsum {

// Whether guidance at a phase comes from oracle extraction (document and
// reference) or automatic prediction (document only).
enum class Regime { oracle, automatic };

Regime regime_from_string(const std::string& name);
std::string to_string(Regime regime);

struct OptimSettings {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int batch_size = 8;
};

struct ExperimentSpec {
    GuidanceKind guidance_kind = GuidanceKind::sentences;
    Regime train_regime = Regime::oracle;
    Regime test_regime = Regime::automatic;
    std::string train_path;
    std::string valid_path;
    std::string test_path;
    GSumConfig model;
    GuidanceConfig guidance;
    OptimSettings optim;
    GSumModel::BeamParams beam;
    uint64_t seed = 1;
    int max_steps = 2000;
    int eval_every = 200;
    int vocab_min_freq = 1;
    int vocab_max_size = 20000;
    bool log_val_rouge = false;
};

struct TrainError : std::runtime_error {
    long long step;
    TrainError(long long step_, const std::string& what)
        : std::runtime_error(what), step(step_) {}
};

struct TrainLogRecord {
    long long step = 0;
    double loss = 0.0;
    std::optional<double> val_loss;
    std::optional<double> val_rouge1;
};

struct TrainResult {
    std::shared_ptr<GSumModel> model;  // best-validation parameters, eval mode
    Vocab vocab;
    std::vector<TrainLogRecord> log;
    double best_val_loss = 0.0;
    long long best_step = 0;
};

// Token streams for one example under a given regime: truncated source ids,
// rendered guidance ids, BOS...EOS target ids.
struct PreparedExample {
    std::vector<int> src;
    std::vector<int> guid;
    std::vector<int> tgt;
    std::string guidance_text;
};

PreparedExample prepare_example(const Example& ex, const Vocab& vocab, Regime regime,
                                GuidanceKind kind, const GuidanceConfig& gcfg,
                                const GSumConfig& mcfg, const RetrievalIndex* index,
                                const GuidanceSignal* override_signal = nullptr);

// Retrieval index for the regime's query field, built over the training
// corpus; null for non-retrieved guidance.
std::unique_ptr<RetrievalIndex> build_index_for(const Corpus& train, GuidanceKind kind,
                                                Regime regime, const Bm25Params& params);

TrainResult train(const ExperimentSpec& spec, const Corpus& train_corpus,
                  const Corpus& valid_corpus);

void write_train_log(const std::vector<TrainLogRecord>& log, const std::string& path);

struct EvalRecord {
    std::string id;
    std::string guidance_text;
    std::string output_text;
    double r1 = 0.0, r2 = 0.0, rl = 0.0;  // per-example F1
    std::string corpus_tag;
};

struct EvalResult {
    std::vector<EvalRecord> records;
    RougeScore r1, r2, rl;  // means over examples
};

using GuidanceOverrides = std::map<std::string, GuidanceSignal>;

// Beam-search decoding over a frozen model (eval mode required), fanned out
// across examples. Guidance follows the regime unless an override for the
// example id is supplied (the manual-definition path).
EvalResult evaluate(const GSumModel& model, const Vocab& vocab, const Corpus& corpus,
                    Regime regime, GuidanceKind kind, const GuidanceConfig& gcfg,
                    const RetrievalIndex* index, const GSumModel::BeamParams& beam,
                    const GuidanceOverrides* overrides = nullptr,
                    const std::string& corpus_tag = "");

void write_eval_records(const EvalResult& result, const std::string& path);

// Teacher-forced argmax accuracy over target positions.
double token_accuracy(const GSumModel& model, const Vocab& vocab, const Corpus& corpus,
                      Regime regime, GuidanceKind kind, const GuidanceConfig& gcfg,
                      const RetrievalIndex* index);

// Mean loss over a corpus (no gradient).
double corpus_loss(const GSumModel& model, const Vocab& vocab, const Corpus& corpus,
                   Regime regime, GuidanceKind kind, const GuidanceConfig& gcfg,
                   const RetrievalIndex* index);

struct RegimeGridResult {
    // Indexed [train regime][test regime] with 0 = oracle, 1 = automatic.
    EvalResult cell[2][2];
};

// Trains once per train regime and evaluates under both test regimes.
RegimeGridResult regime_grid(const ExperimentSpec& spec, const Corpus& train_corpus,
                             const Corpus& valid_corpus, const Corpus& test_corpus);

// Standard evaluate of a model trained on corpus A against corpus B; the
// vocabulary stays A's (unknown tokens map to UNK) and records carry the
// provenance tag.
EvalResult cross_corpus_eval(const GSumModel& model, const Vocab& vocab_from_a,
                             const Corpus& corpus_b, Regime regime, GuidanceKind kind,
                             const GuidanceConfig& gcfg, const RetrievalIndex* index,
                             const GSumModel::BeamParams& beam, const std::string& tag);

}  // namespace gsum
