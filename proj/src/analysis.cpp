#include "gsum/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gsum {

namespace {

void check_aligned(const std::vector<SystemOutputs>& systems, const ReferenceMap& refs) {
    if (systems.size() < 2)
        throw std::invalid_argument("aggregate_best: need at least 2 systems");
    for (const auto& sys : systems) {
        if (sys.outputs.size() != refs.size())
            throw std::invalid_argument("aggregate_best: system " + sys.name +
                                        " covers a different id set");
        for (const auto& [id, out] : sys.outputs)
            if (!refs.count(id))
                throw std::invalid_argument("aggregate_best: system " + sys.name +
                                            " has unknown id " + id);
    }
}

}  // namespace

AggregateResult aggregate_best(const std::vector<SystemOutputs>& systems,
                               const ReferenceMap& refs) {
    check_aligned(systems, refs);
    AggregateResult result;
    for (const auto& sys : systems) result.names.push_back(sys.name);
    result.win_fraction.assign(systems.size(), 0.0);

    std::vector<RougeScore> best_r1, best_r2, best_rl;
    for (const auto& [id, ref] : refs) {
        int winner = -1;
        RougeScore w1, w2, wl;
        for (size_t s = 0; s < systems.size(); ++s) {
            const Tokens& out = systems[s].outputs.at(id);
            const auto c1 = rouge_n(out, ref, 1);
            const auto c2 = rouge_n(out, ref, 2);
            const auto cl = rouge_l(out, ref);
            const bool better =
                winner < 0 || c1.f1 > w1.f1 ||
                (c1.f1 == w1.f1 && (c2.f1 > w2.f1 || (c2.f1 == w2.f1 && cl.f1 > wl.f1)));
            if (better) {
                winner = static_cast<int>(s);
                w1 = c1;
                w2 = c2;
                wl = cl;
            }
        }
        result.win_fraction[static_cast<size_t>(winner)] += 1.0;
        best_r1.push_back(w1);
        best_r2.push_back(w2);
        best_rl.push_back(wl);
    }
    for (auto& w : result.win_fraction) w /= static_cast<double>(refs.size());
    result.r1 = mean_rouge(best_r1);
    result.r2 = mean_rouge(best_r2);
    result.rl = mean_rouge(best_rl);
    return result;
}

std::vector<std::vector<double>> pairwise_matrix(const std::vector<SystemOutputs>& systems,
                                                 const ReferenceMap& refs) {
    check_aligned(systems, refs);
    const size_t n = systems.size();
    std::vector<std::vector<double>> matrix(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        // Diagonal: the system's own mean R1.
        std::vector<RougeScore> scores;
        for (const auto& [id, ref] : refs)
            scores.push_back(rouge_n(systems[i].outputs.at(id), ref, 1));
        matrix[i][i] = mean_rouge(scores).f1;
        for (size_t j = i + 1; j < n; ++j) {
            const auto combined = aggregate_best({systems[i], systems[j]}, refs);
            matrix[i][j] = combined.r1.f1;
            matrix[j][i] = combined.r1.f1;
        }
    }
    return matrix;
}

HalvesResult controllability_halves(const GSumModel& model, const Vocab& vocab,
                                    const Corpus& examples, GuidanceKind kind,
                                    const GuidanceConfig& cfg, const RetrievalIndex* index,
                                    const GSumModel::BeamParams& beam) {
    if (model.training())
        throw std::logic_error("controllability_halves: model must be in eval mode");
    struct PerExample {
        bool used = false;
        double r1[2][2] = {{0, 0}, {0, 0}};
        double p[2][2] = {{0, 0}, {0, 0}};
        double r[2][2] = {{0, 0}, {0, 0}};
    };
    std::vector<PerExample> rows(examples.size());

    const long long n = static_cast<long long>(examples.size());
#pragma omp parallel for schedule(dynamic)
    for (long long e = 0; e < n; ++e) {
        const Example& ex = examples[static_cast<size_t>(e)];
        const size_t n_sents = ex.reference_sentences.size();
        if (n_sents < 2) continue;
        const size_t mid = (n_sents + 1) / 2;  // extra sentence to the first half

        Example halves[2];
        for (int h = 0; h < 2; ++h) {
            halves[h] = ex;
            halves[h].reference_sentences.assign(
                ex.reference_sentences.begin() + (h == 0 ? 0 : mid),
                h == 0 ? ex.reference_sentences.begin() + mid : ex.reference_sentences.end());
            halves[h].reference.clear();
            for (const auto& sent : halves[h].reference_sentences)
                halves[h].reference.insert(halves[h].reference.end(), sent.begin(),
                                           sent.end());
        }

        PerExample& row = rows[static_cast<size_t>(e)];
        row.used = true;
        for (int g = 0; g < 2; ++g) {
            const auto prepared = prepare_example(halves[g], vocab, Regime::oracle, kind, cfg,
                                                  model.config(), index);
            const auto output_ids = model.beam_search(prepared.src, prepared.guid, beam);
            const Tokens output = vocab.decode(output_ids);
            for (int r = 0; r < 2; ++r) {
                const auto score = rouge_n(output, halves[r].reference, 1);
                row.r1[g][r] = score.f1;
                row.p[g][r] = score.precision;
                row.r[g][r] = score.recall;
            }
        }
    }

    HalvesResult result;
    for (const auto& row : rows) {
        if (!row.used) {
            ++result.skipped;
            continue;
        }
        ++result.used;
        for (int g = 0; g < 2; ++g)
            for (int r = 0; r < 2; ++r) {
                result.cell[g][r].f1 += row.r1[g][r];
                result.cell[g][r].precision += row.p[g][r];
                result.cell[g][r].recall += row.r[g][r];
            }
    }
    if (result.used > 0)
        for (int g = 0; g < 2; ++g)
            for (int r = 0; r < 2; ++r) {
                result.cell[g][r].f1 /= result.used;
                result.cell[g][r].precision /= result.used;
                result.cell[g][r].recall /= result.used;
            }
    return result;
}

CorrelationResult pearson(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 3)
        throw std::invalid_argument("pearson: need at least 3 pairs, got " +
                                    std::to_string(pairs.size()));
    const double n = static_cast<double>(pairs.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (const auto& [x, y] : pairs) {
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    CorrelationResult result;
    result.n_pairs = static_cast<int>(pairs.size());
    result.pairs = pairs;
    const double var_x = n * sxx - sx * sx;
    const double var_y = n * syy - sy * sy;
    if (var_x <= 0.0 || var_y <= 0.0) {
        result.defined = false;
        return result;
    }
    result.defined = true;
    result.r = (n * sxy - sx * sy) / std::sqrt(var_x * var_y);
    return result;
}

CorrelationResult guidance_quality_correlation(const GSumModel& model, const Vocab& vocab,
                                               const Corpus& examples,
                                               int samples_per_example, uint64_t seed,
                                               const GuidanceConfig& cfg,
                                               const GSumModel::BeamParams& beam) {
    if (samples_per_example < 1)
        throw std::invalid_argument("guidance_quality_correlation: need >= 1 sample");
    if (model.training())
        throw std::logic_error("guidance_quality_correlation: model must be in eval mode");

    // Subsets are drawn up front so decoding can fan out across samples.
    struct Sample {
        const Example* ex;
        GuidanceSignal signal;
        double guidance_r1;
    };
    std::vector<Sample> samples;
    std::mt19937_64 rng(seed);
    for (const auto& ex : examples) {
        const int n_sents = static_cast<int>(ex.document.sentences.size());
        if (n_sents == 0 || ex.reference.empty()) continue;
        for (int s = 0; s < samples_per_example; ++s) {
            const int max_take = std::min(cfg.n_ext, n_sents);
            const int take = std::uniform_int_distribution<int>(1, max_take)(rng);
            std::vector<int> indices(static_cast<size_t>(n_sents));
            for (int i = 0; i < n_sents; ++i) indices[static_cast<size_t>(i)] = i;
            for (int i = 0; i < take; ++i) {
                std::uniform_int_distribution<int> pick(i, n_sents - 1);
                std::swap(indices[static_cast<size_t>(i)],
                          indices[static_cast<size_t>(pick(rng))]);
            }
            indices.resize(static_cast<size_t>(take));
            std::sort(indices.begin(), indices.end());

            SentencesSignal sig;
            sig.indices = indices;
            Tokens joined;
            for (int idx : indices) {
                sig.texts.push_back(ex.document.sentences[static_cast<size_t>(idx)]);
                joined.insert(joined.end(), sig.texts.back().begin(), sig.texts.back().end());
            }
            Sample sample;
            sample.ex = &ex;
            sample.signal = GuidanceSignal{GuidanceKind::sentences, std::move(sig)};
            sample.guidance_r1 = rouge_n(joined, ex.reference, 1).f1;
            samples.push_back(std::move(sample));
        }
    }

    std::vector<std::pair<double, double>> pairs(samples.size());
    const long long n = static_cast<long long>(samples.size());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
        const Sample& sample = samples[static_cast<size_t>(i)];
        const auto prepared =
            prepare_example(*sample.ex, vocab, Regime::oracle, GuidanceKind::sentences, cfg,
                            model.config(), nullptr, &sample.signal);
        const auto output_ids = model.beam_search(prepared.src, prepared.guid, beam);
        const Tokens output = vocab.decode(output_ids);
        pairs[static_cast<size_t>(i)] = {sample.guidance_r1,
                                         rouge_n(output, sample.ex->reference, 1).f1};
    }
    return pearson(pairs);
}

std::vector<NoveltyRow> novelty_report(const std::map<std::string, Tokens>& outputs,
                                       const Corpus& corpus, int max_n) {
    std::map<std::string, const Example*> by_id;
    for (const auto& ex : corpus) by_id[ex.document.id] = &ex;
    for (const auto& [id, out] : outputs)
        if (!by_id.count(id))
            throw std::invalid_argument("novelty_report: unknown id " + id);

    std::vector<NoveltyRow> rows;
    for (int n = 1; n <= max_n; ++n) {
        NoveltyRow row;
        row.n = n;
        int count = 0;
        for (const auto& [id, out] : outputs) {
            const Example& ex = *by_id.at(id);
            const auto stats = novel_ngram_stats(out, ex.document.all_tokens(), ex.reference, n);
            row.mean_novel_fraction += stats.novel_fraction;
            row.mean_novel_recall += stats.novel_recall;
            ++count;
        }
        if (count > 0) {
            row.mean_novel_fraction /= count;
            row.mean_novel_recall /= count;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace gsum
