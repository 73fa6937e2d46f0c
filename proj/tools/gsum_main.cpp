// gsum: guided summarization experiments over line-delimited corpora.
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsum/analysis.hpp"
#include "gsum/config.hpp"
#include "gsum/corpus.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gsum;

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> data_dir;
    std::optional<std::string> guidance_kind;
    std::optional<std::string> train_regime;
    std::optional<std::string> test_regime;
    std::optional<int> beam;
    std::optional<std::string> train_path;
    std::optional<std::string> valid_path;
    std::optional<std::string> test_path;
    std::optional<int> max_steps;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file");
    cmd->add_option("--seed", flags.seed, "random seed");
    cmd->add_option("--out-dir", flags.out_dir, "output directory");
    cmd->add_option("--data-dir", flags.data_dir, "stopword/verb list directory");
    cmd->add_option("--guidance-kind", flags.guidance_kind,
                    "sentences|keywords|relations|retrieved");
    cmd->add_option("--train-regime", flags.train_regime, "oracle|auto");
    cmd->add_option("--test-regime", flags.test_regime, "oracle|auto");
    cmd->add_option("--beam", flags.beam, "beam width");
    cmd->add_option("--train-corpus", flags.train_path, "training corpus path");
    cmd->add_option("--valid-corpus", flags.valid_path, "validation corpus path");
    cmd->add_option("--test-corpus", flags.test_path, "test corpus path");
    cmd->add_option("--max-steps", flags.max_steps, "training steps");
}

RunConfig resolve_config(const CommonFlags& flags) {
    RunConfig cfg =
        flags.config_path.empty() ? RunConfig::defaults() : RunConfig::from_file(flags.config_path);
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.out_dir) cfg.out_dir = *flags.out_dir;
    if (flags.data_dir) cfg.data_dir = *flags.data_dir;
    if (flags.guidance_kind) cfg.kind = guidance_kind_from_string(*flags.guidance_kind);
    if (flags.train_regime) cfg.train_regime = regime_from_string(*flags.train_regime);
    if (flags.test_regime) cfg.test_regime = regime_from_string(*flags.test_regime);
    if (flags.beam) cfg.beam.beam = *flags.beam;
    if (flags.train_path) cfg.train_path = *flags.train_path;
    if (flags.valid_path) cfg.valid_path = *flags.valid_path;
    if (flags.test_path) cfg.test_path = *flags.test_path;
    if (flags.max_steps) cfg.max_steps = *flags.max_steps;
    return cfg;
}

// The wordlists live for the whole process; GuidanceConfig keeps a pointer.
Wordlists g_wordlists;

void install_wordlists(RunConfig& cfg) {
    g_wordlists = cfg.data_dir.empty() ? Wordlists::defaults() : Wordlists::load(cfg.data_dir);
    cfg.guidance.words = &g_wordlists;
}

void ensure_out_dir(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    RunConfig echo = cfg;
    echo.echo((fs::path(cfg.out_dir) / "config.json").string());
}

json signal_payload(const GuidanceSignal& signal) {
    switch (signal.kind) {
        case GuidanceKind::sentences: {
            json arr = json::array();
            for (const auto& t : signal.sentences().texts) arr.push_back(join_tokens(t));
            return arr;
        }
        case GuidanceKind::keywords: {
            json arr = json::array();
            for (const auto& w : signal.keywords().words) arr.push_back(w);
            return arr;
        }
        case GuidanceKind::relations: {
            json arr = json::array();
            for (const auto& t : signal.relations().triples)
                arr.push_back({join_tokens(t.subject), join_tokens(t.relation),
                               join_tokens(t.object)});
            return arr;
        }
        case GuidanceKind::retrieved: {
            json arr = json::array();
            for (const auto& s : signal.retrieved().summaries) arr.push_back(join_tokens(s));
            return arr;
        }
    }
    return {};
}

GuidanceSignal signal_from_payload(GuidanceKind kind, const json& payload) {
    GuidanceSignal sig;
    sig.kind = kind;
    switch (kind) {
        case GuidanceKind::sentences: {
            SentencesSignal s;
            for (const auto& item : payload) s.texts.push_back(tokenize(item.get<std::string>()));
            sig.payload = std::move(s);
            break;
        }
        case GuidanceKind::keywords: {
            KeywordsSignal k;
            if (payload.is_string()) {
                k.words = tokenize(payload.get<std::string>());
            } else {
                for (const auto& item : payload)
                    for (const auto& w : tokenize(item.get<std::string>()))
                        k.words.push_back(w);
            }
            sig.payload = std::move(k);
            break;
        }
        case GuidanceKind::relations: {
            RelationsSignal r;
            for (const auto& item : payload) {
                if (!item.is_array() || item.size() != 3)
                    throw std::invalid_argument(
                        "guidance file: relations payload entries must be [s, r, o]");
                Triple t;
                t.subject = tokenize(item[0].get<std::string>());
                t.relation = tokenize(item[1].get<std::string>());
                t.object = tokenize(item[2].get<std::string>());
                r.triples.push_back(std::move(t));
            }
            sig.payload = std::move(r);
            break;
        }
        case GuidanceKind::retrieved: {
            RetrievedSignal r;
            for (const auto& item : payload) {
                r.summaries.push_back(tokenize(item.get<std::string>()));
                r.source_ids.push_back("");
            }
            sig.payload = std::move(r);
            break;
        }
    }
    return sig;
}

GuidanceOverrides load_guidance_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("guidance file: cannot open " + path);
    GuidanceOverrides overrides;
    std::string line;
    size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw std::invalid_argument("guidance file line " + std::to_string(line_no) +
                                        ": " + e.what());
        }
        const auto id = record.at("id").get<std::string>();
        const auto kind = guidance_kind_from_string(record.at("kind").get<std::string>());
        overrides[id] = signal_from_payload(kind, record.at("payload"));
    }
    return overrides;
}

// Loads a checkpoint + vocab pair written by `train`.
std::pair<GSumModel, Vocab> load_model_dir(const std::string& ckpt_path,
                                           std::string vocab_path) {
    if (vocab_path.empty())
        vocab_path = (fs::path(ckpt_path).parent_path() / "vocab.txt").string();
    GSumModel model = GSumModel::load_checkpoint(ckpt_path);
    model.set_training(false);
    Vocab vocab = Vocab::load(vocab_path);
    if (vocab.size() != model.config().vocab_size)
        throw std::invalid_argument("vocab " + vocab_path + " (" +
                                    std::to_string(vocab.size()) +
                                    " ids) does not match checkpoint vocab_size " +
                                    std::to_string(model.config().vocab_size));
    return {std::move(model), std::move(vocab)};
}

std::unique_ptr<RetrievalIndex> resolve_index(const RunConfig& cfg, Regime regime,
                                              const std::string& index_path) {
    if (cfg.kind != GuidanceKind::retrieved) return nullptr;
    if (!index_path.empty())
        return std::make_unique<RetrievalIndex>(RetrievalIndex::load(index_path));
    if (cfg.train_path.empty())
        throw std::invalid_argument(
            "retrieved guidance needs --index or --train-corpus to build one");
    const auto train_corpus = ingest_corpus(cfg.train_path);
    return build_index_for(train_corpus, cfg.kind, regime, cfg.guidance.bm25);
}

void print_scores(const std::string& label, const EvalResult& result) {
    std::printf("%s  R1 %.4f  R2 %.4f  RL %.4f  (%zu examples)\n", label.c_str(),
                result.r1.f1, result.r2.f1, result.rl.f1, result.records.size());
}

// ---------------------------------------------------------------------------

int cmd_make_synthetic(const CommonFlags& flags, const SyntheticParams& params_in,
                       const std::string& out_path) {
    SyntheticParams params = params_in;
    if (flags.seed) params.seed = *flags.seed;
    make_synthetic_corpus(params, out_path);
    std::printf("wrote %d synthetic examples to %s\n", params.n_examples, out_path.c_str());
    return 0;
}

int cmd_oracle_extract(const CommonFlags& flags, const std::string& corpus_path,
                       const std::string& out_path, const std::string& index_path) {
    RunConfig cfg = resolve_config(flags);
    install_wordlists(cfg);
    const auto corpus = ingest_corpus(corpus_path);
    std::unique_ptr<RetrievalIndex> index;
    if (cfg.kind == GuidanceKind::retrieved) {
        if (!index_path.empty())
            index = std::make_unique<RetrievalIndex>(RetrievalIndex::load(index_path));
        else
            index = build_index_for(corpus, cfg.kind, Regime::oracle, cfg.guidance.bm25);
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + out_path);
    for (const auto& ex : corpus) {
        const auto signal = oracle_guidance(ex, index.get(), cfg.kind, cfg.guidance);
        json record;
        record["id"] = ex.document.id;
        record["kind"] = to_string(cfg.kind);
        record["payload"] = signal_payload(signal);
        out << record.dump() << '\n';
    }
    std::printf("wrote %s guidance for %zu examples to %s\n", to_string(cfg.kind).c_str(),
                corpus.size(), out_path.c_str());
    return 0;
}

int cmd_build_index(const std::string& corpus_path, const std::string& field_name,
                    const std::string& out_path, const CommonFlags& flags) {
    RunConfig cfg = resolve_config(flags);
    const auto corpus = ingest_corpus(corpus_path);
    const auto field = index_field_from_string(field_name);
    const auto index = RetrievalIndex::build(corpus, field, cfg.guidance.bm25);
    index.save(out_path);
    std::printf("indexed %zu examples (%s field) into %s\n", index.num_docs(),
                field_name.c_str(), out_path.c_str());
    return 0;
}

int cmd_train(const CommonFlags& flags) {
    RunConfig cfg = resolve_config(flags);
    install_wordlists(cfg);
    if (cfg.train_path.empty()) throw std::invalid_argument("train: --train-corpus required");
    ensure_out_dir(cfg);
    const auto train_corpus = ingest_corpus(cfg.train_path);
    const Corpus valid_corpus =
        cfg.valid_path.empty() ? Corpus{} : ingest_corpus(cfg.valid_path);

    const auto result = train(cfg.to_spec(), train_corpus, valid_corpus);

    const fs::path out(cfg.out_dir);
    result.model->save_checkpoint((out / "model.ckpt").string());
    result.vocab.save((out / "vocab.txt").string());
    write_train_log(result.log, (out / "train_log.jsonl").string());
    std::printf("trained %d steps; best val loss %.6f at step %lld; artifacts in %s\n",
                cfg.max_steps, result.best_val_loss, result.best_step, cfg.out_dir.c_str());
    return 0;
}

int cmd_summarize(const CommonFlags& flags, const std::string& ckpt, const std::string& vocab_path,
                  const std::string& corpus_path, const std::string& guidance_file,
                  const std::string& index_path) {
    RunConfig cfg = resolve_config(flags);
    install_wordlists(cfg);
    ensure_out_dir(cfg);
    auto [model, vocab] = load_model_dir(ckpt, vocab_path);
    const auto corpus = ingest_corpus(corpus_path, /*require_reference=*/false);
    GuidanceOverrides overrides;
    if (!guidance_file.empty()) overrides = load_guidance_file(guidance_file);
    const auto index = resolve_index(cfg, cfg.test_regime, index_path);

    const auto result = evaluate(model, vocab, corpus, cfg.test_regime, cfg.kind,
                                 cfg.guidance, index.get(), cfg.beam,
                                 overrides.empty() ? nullptr : &overrides);
    const auto out_path = (fs::path(cfg.out_dir) / "summaries.jsonl").string();
    std::ofstream out(out_path, std::ios::binary);
    for (const auto& r : result.records) {
        json record;
        record["id"] = r.id;
        record["guidance"] = r.guidance_text;
        record["output"] = r.output_text;
        out << record.dump() << '\n';
    }
    std::printf("wrote %zu summaries to %s\n", result.records.size(), out_path.c_str());
    return 0;
}

int cmd_evaluate(const CommonFlags& flags, const std::string& ckpt,
                 const std::string& vocab_path, const std::string& corpus_path,
                 const std::string& guidance_file, const std::string& index_path,
                 const std::string& tag) {
    RunConfig cfg = resolve_config(flags);
    install_wordlists(cfg);
    ensure_out_dir(cfg);
    auto [model, vocab] = load_model_dir(ckpt, vocab_path);
    const auto corpus = ingest_corpus(corpus_path);
    GuidanceOverrides overrides;
    if (!guidance_file.empty()) overrides = load_guidance_file(guidance_file);
    const auto index = resolve_index(cfg, cfg.test_regime, index_path);

    const auto result = evaluate(model, vocab, corpus, cfg.test_regime, cfg.kind,
                                 cfg.guidance, index.get(), cfg.beam,
                                 overrides.empty() ? nullptr : &overrides, tag);
    write_eval_records(result, (fs::path(cfg.out_dir) / "eval.jsonl").string());
    print_scores("corpus", result);
    return 0;
}

int cmd_regime_grid(const CommonFlags& flags) {
    RunConfig cfg = resolve_config(flags);
    install_wordlists(cfg);
    if (cfg.train_path.empty() || cfg.test_path.empty())
        throw std::invalid_argument("regime-grid: --train-corpus and --test-corpus required");
    ensure_out_dir(cfg);
    const auto train_corpus = ingest_corpus(cfg.train_path);
    const Corpus valid_corpus =
        cfg.valid_path.empty() ? Corpus{} : ingest_corpus(cfg.valid_path);
    const auto test_corpus = ingest_corpus(cfg.test_path);

    const auto grid = regime_grid(cfg.to_spec(), train_corpus, valid_corpus, test_corpus);

    const char* names[2] = {"oracle", "auto"};
    const fs::path out(cfg.out_dir);
    std::ofstream table((out / "grid_table.txt").string(), std::ios::binary);
    table << "train\\test      oracle                auto\n";
    for (int tr = 0; tr < 2; ++tr) {
        char line[256];
        std::snprintf(line, sizeof(line),
                      "%-8s  %.4f/%.4f/%.4f  %.4f/%.4f/%.4f\n", names[tr],
                      grid.cell[tr][0].r1.f1, grid.cell[tr][0].r2.f1, grid.cell[tr][0].rl.f1,
                      grid.cell[tr][1].r1.f1, grid.cell[tr][1].r2.f1, grid.cell[tr][1].rl.f1);
        table << line;
        std::fputs(line, stdout);
        for (int te = 0; te < 2; ++te)
            write_eval_records(grid.cell[tr][te],
                               (out / ("grid_" + std::string(names[tr]) + "_" + names[te] +
                                       ".jsonl"))
                                   .string());
    }
    return 0;
}

std::map<std::string, Tokens> read_outputs_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open outputs file " + path);
    std::map<std::string, Tokens> outputs;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const json record = json::parse(line);
        if (!record.contains("id")) continue;  // trailing summary line
        outputs[record.at("id").get<std::string>()] =
            tokenize(record.at("output").get<std::string>());
    }
    return outputs;
}

int cmd_analyze(const CommonFlags& flags, const std::string& mode,
                const std::vector<std::string>& system_files, const std::string& corpus_path,
                const std::string& ckpt, const std::string& vocab_path,
                const std::string& index_path, int samples) {
    RunConfig cfg = resolve_config(flags);
    install_wordlists(cfg);
    ensure_out_dir(cfg);
    const fs::path out(cfg.out_dir);
    const auto corpus = ingest_corpus(corpus_path);

    if (mode == "aggregate" || mode == "pairwise") {
        if (system_files.size() < 2)
            throw std::invalid_argument("analyze " + mode + ": need >= 2 --system files");
        ReferenceMap refs;
        std::vector<SystemOutputs> systems;
        for (const auto& file : system_files) {
            SystemOutputs sys;
            sys.name = fs::path(file).stem().string();
            sys.outputs = read_outputs_file(file);
            systems.push_back(std::move(sys));
        }
        for (const auto& ex : corpus)
            if (systems[0].outputs.count(ex.document.id))
                refs[ex.document.id] = ex.reference;

        std::ofstream records((out / ("analysis_" + mode + ".jsonl")).string(),
                              std::ios::binary);
        if (mode == "aggregate") {
            const auto agg = aggregate_best(systems, refs);
            std::printf("combined  R1 %.4f  R2 %.4f  RL %.4f\n", agg.r1.f1, agg.r2.f1,
                        agg.rl.f1);
            for (size_t s = 0; s < systems.size(); ++s) {
                std::printf("win %-20s %.4f\n", agg.names[s].c_str(), agg.win_fraction[s]);
                json rec{{"system", agg.names[s]}, {"win_fraction", agg.win_fraction[s]}};
                records << rec.dump() << '\n';
            }
            json rec{{"combined_r1", agg.r1.f1},
                     {"combined_r2", agg.r2.f1},
                     {"combined_rl", agg.rl.f1}};
            records << rec.dump() << '\n';
        } else {
            const auto matrix = pairwise_matrix(systems, refs);
            for (size_t i = 0; i < matrix.size(); ++i) {
                for (size_t j = 0; j < matrix.size(); ++j) {
                    std::printf("%8.4f", matrix[i][j]);
                    json rec{{"row", systems[i].name},
                             {"col", systems[j].name},
                             {"combined_r1", matrix[i][j]}};
                    records << rec.dump() << '\n';
                }
                std::printf("  %s\n", systems[i].name.c_str());
            }
        }
        return 0;
    }

    if (mode == "novelty") {
        if (system_files.empty())
            throw std::invalid_argument("analyze novelty: need one --system file");
        const auto outputs = read_outputs_file(system_files[0]);
        const auto rows = novelty_report(outputs, corpus);
        std::ofstream records((out / "analysis_novelty.jsonl").string(), std::ios::binary);
        for (const auto& row : rows) {
            std::printf("n=%d  novel_fraction %.4f  novel_recall %.4f\n", row.n,
                        row.mean_novel_fraction, row.mean_novel_recall);
            json rec{{"n", row.n},
                     {"novel_fraction", row.mean_novel_fraction},
                     {"novel_recall", row.mean_novel_recall}};
            records << rec.dump() << '\n';
        }
        return 0;
    }

    if (mode == "halves" || mode == "correlation") {
        if (ckpt.empty()) throw std::invalid_argument("analyze " + mode + ": --ckpt required");
        auto [model, vocab] = load_model_dir(ckpt, vocab_path);
        const auto index = resolve_index(cfg, Regime::oracle, index_path);
        if (mode == "halves") {
            const auto halves = controllability_halves(model, vocab, corpus, cfg.kind,
                                                       cfg.guidance, index.get(), cfg.beam);
            std::ofstream records((out / "analysis_halves.jsonl").string(), std::ios::binary);
            for (int g = 0; g < 2; ++g)
                for (int r = 0; r < 2; ++r) {
                    std::printf("guidance %s vs reference %s  R1 %.4f\n",
                                g == 0 ? "1st" : "2nd", r == 0 ? "1st" : "2nd",
                                halves.cell[g][r].f1);
                    json rec{{"guidance_half", g},
                             {"reference_half", r},
                             {"r1", halves.cell[g][r].f1}};
                    records << rec.dump() << '\n';
                }
            std::printf("used %d examples, skipped %d single-sentence references\n",
                        halves.used, halves.skipped);
            json rec{{"used", halves.used}, {"skipped", halves.skipped}};
            records << rec.dump() << '\n';
            return 0;
        }
        const auto corr = guidance_quality_correlation(model, vocab, corpus, samples,
                                                       cfg.seed, cfg.guidance, cfg.beam);
        std::ofstream records((out / "analysis_correlation.jsonl").string(), std::ios::binary);
        for (const auto& [g, o] : corr.pairs) {
            json rec{{"guidance_r1", g}, {"output_r1", o}};
            records << rec.dump() << '\n';
        }
        if (corr.defined) {
            std::printf("pearson r = %.4f over %d pairs\n", corr.r, corr.n_pairs);
            json rec{{"pearson_r", corr.r}, {"n_pairs", corr.n_pairs}};
            records << rec.dump() << '\n';
        } else {
            std::printf("correlation undefined (zero variance) over %d pairs\n", corr.n_pairs);
            json rec{{"pearson_r", nullptr}, {"n_pairs", corr.n_pairs}};
            records << rec.dump() << '\n';
        }
        return 0;
    }

    throw std::invalid_argument("analyze: unknown mode " + mode);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"guided summarization experiments"};
    app.require_subcommand(1);

    CommonFlags flags;

    // make-synthetic
    auto* mk = app.add_subcommand("make-synthetic", "generate a synthetic corpus");
    SyntheticParams syn;
    std::string mk_out;
    add_common(mk, flags);
    mk->add_option("--out", mk_out, "output corpus path")->required();
    mk->add_option("--n", syn.n_examples, "number of examples");
    mk->add_option("--sentences-per-doc", syn.sentences_per_doc, "sentences per document");
    mk->add_option("--subset-size", syn.subset_size, "reference subset size");
    mk->add_option("--substitution-rate", syn.substitution_rate, "synonym swap probability");

    // oracle-extract
    auto* oe = app.add_subcommand("oracle-extract", "write oracle guidance for a corpus");
    std::string oe_corpus, oe_out, oe_index;
    add_common(oe, flags);
    oe->add_option("--corpus", oe_corpus, "corpus path")->required();
    oe->add_option("--out", oe_out, "guidance output path")->required();
    oe->add_option("--index", oe_index, "prebuilt retrieval index");

    // build-index
    auto* bi = app.add_subcommand("build-index", "build a BM25 retrieval index");
    std::string bi_corpus, bi_field = "document", bi_out;
    add_common(bi, flags);
    bi->add_option("--corpus", bi_corpus, "corpus path")->required();
    bi->add_option("--field", bi_field, "document|summary");
    bi->add_option("--out", bi_out, "index output path")->required();

    // train
    auto* tr = app.add_subcommand("train", "train a guided summarizer");
    add_common(tr, flags);

    // summarize
    auto* su = app.add_subcommand("summarize", "decode a corpus with a trained model");
    std::string su_ckpt, su_vocab, su_corpus, su_guidance, su_index;
    add_common(su, flags);
    su->add_option("--ckpt", su_ckpt, "checkpoint path")->required();
    su->add_option("--vocab", su_vocab, "vocab path (default: next to checkpoint)");
    su->add_option("--corpus", su_corpus, "corpus path")->required();
    su->add_option("--guidance-file", su_guidance, "per-example guidance overrides");
    su->add_option("--index", su_index, "prebuilt retrieval index");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "decode and score a corpus");
    std::string ev_ckpt, ev_vocab, ev_corpus, ev_guidance, ev_index, ev_tag;
    add_common(ev, flags);
    ev->add_option("--ckpt", ev_ckpt, "checkpoint path")->required();
    ev->add_option("--vocab", ev_vocab, "vocab path (default: next to checkpoint)");
    ev->add_option("--corpus", ev_corpus, "corpus path")->required();
    ev->add_option("--guidance-file", ev_guidance, "per-example guidance overrides");
    ev->add_option("--index", ev_index, "prebuilt retrieval index");
    ev->add_option("--tag", ev_tag, "corpus provenance tag for the records");

    // regime-grid
    auto* rg = app.add_subcommand("regime-grid",
                                  "train and evaluate the oracle/auto 2x2 grid");
    add_common(rg, flags);

    // analyze
    auto* an = app.add_subcommand("analyze", "aggregation and controllability analyses");
    std::string an_mode, an_corpus, an_ckpt, an_vocab, an_index;
    std::vector<std::string> an_systems;
    int an_samples = 4;
    add_common(an, flags);
    an->add_option("--mode", an_mode, "aggregate|pairwise|novelty|halves|correlation")
        ->required();
    an->add_option("--system", an_systems, "eval record file (repeatable)");
    an->add_option("--corpus", an_corpus, "corpus with references")->required();
    an->add_option("--ckpt", an_ckpt, "checkpoint (halves/correlation)");
    an->add_option("--vocab", an_vocab, "vocab path");
    an->add_option("--index", an_index, "prebuilt retrieval index");
    an->add_option("--samples", an_samples, "samples per example (correlation)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (mk->parsed()) return cmd_make_synthetic(flags, syn, mk_out);
        if (oe->parsed()) return cmd_oracle_extract(flags, oe_corpus, oe_out, oe_index);
        if (bi->parsed()) return cmd_build_index(bi_corpus, bi_field, bi_out, flags);
        if (tr->parsed()) return cmd_train(flags);
        if (su->parsed())
            return cmd_summarize(flags, su_ckpt, su_vocab, su_corpus, su_guidance, su_index);
        if (ev->parsed())
            return cmd_evaluate(flags, ev_ckpt, ev_vocab, ev_corpus, ev_guidance, ev_index,
                                ev_tag);
        if (rg->parsed()) return cmd_regime_grid(flags);
        if (an->parsed())
            return cmd_analyze(flags, an_mode, an_systems, an_corpus, an_ckpt, an_vocab,
                               an_index, an_samples);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: no subcommand\n";
    return 1;
}
