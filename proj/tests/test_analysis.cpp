#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gsum/analysis.hpp"
#include "gsum/corpus.hpp"

using namespace gsum;

namespace {

SystemOutputs make_system(const std::string& name,
                          std::initializer_list<std::pair<std::string, std::string>> items) {
    SystemOutputs sys;
    sys.name = name;
    for (const auto& [id, text] : items) sys.outputs[id] = tokenize(text);
    return sys;
}

ReferenceMap make_refs(std::initializer_list<std::pair<std::string, std::string>> items) {
    ReferenceMap refs;
    for (const auto& [id, text] : items) refs[id] = tokenize(text);
    return refs;
}

Tokens random_sentence(std::mt19937& rng, int len) {
    static const std::vector<std::string> words = {"boat", "stone", "river", "lamp",
                                                   "wall", "fort",  "moat",  "garden"};
    std::uniform_int_distribution<size_t> pick(0, words.size() - 1);
    Tokens out;
    for (int i = 0; i < len; ++i) out.push_back(words[pick(rng)]);
    return out;
}

}  // namespace

TEST_CASE("aggregate_best: identical systems tie to the first") {
    auto a = make_system("a", {{"1", "boat river"}, {"2", "stone wall"}});
    auto b = make_system("b", {{"1", "boat river"}, {"2", "stone wall"}});
    auto refs = make_refs({{"1", "boat river"}, {"2", "stone fort"}});
    const auto agg = aggregate_best({a, b}, refs);
    CHECK(agg.win_fraction[0] == doctest::Approx(1.0));
    CHECK(agg.win_fraction[1] == doctest::Approx(0.0));

    // Combined equals the (identical) single-system score.
    std::vector<RougeScore> single;
    for (const auto& [id, ref] : refs) single.push_back(rouge_n(a.outputs[id], ref, 1));
    CHECK(agg.r1.f1 == doctest::Approx(mean_rouge(single).f1));
}

TEST_CASE("aggregate_best dominates any single system and wins sum to 1") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        ReferenceMap refs;
        std::vector<SystemOutputs> systems(4);
        for (int s = 0; s < 4; ++s) systems[s].name = "sys" + std::to_string(s);
        for (int e = 0; e < 20; ++e) {
            const std::string id = "e" + std::to_string(e);
            refs[id] = random_sentence(rng, 6);
            for (auto& sys : systems) sys.outputs[id] = random_sentence(rng, 5);
        }
        const auto agg = aggregate_best(systems, refs);
        double win_total = 0.0;
        for (double w : agg.win_fraction) win_total += w;
        CHECK(std::abs(win_total - 1.0) <= 1e-12);

        for (const auto& sys : systems) {
            std::vector<RougeScore> scores;
            for (const auto& [id, ref] : refs) scores.push_back(rouge_n(sys.outputs.at(id), ref, 1));
            CHECK(agg.r1.f1 >= mean_rouge(scores).f1 - 1e-12);
        }

        // Brute-force recomputation of the combined score and wins.
        double combined = 0.0;
        std::vector<double> wins(4, 0.0);
        for (const auto& [id, ref] : refs) {
            int best = -1;
            double b1 = -1, b2 = -1, bl = -1;
            for (int s = 0; s < 4; ++s) {
                const double c1 = rouge_n(systems[s].outputs.at(id), ref, 1).f1;
                const double c2 = rouge_n(systems[s].outputs.at(id), ref, 2).f1;
                const double cl = rouge_l(systems[s].outputs.at(id), ref).f1;
                if (best < 0 || c1 > b1 || (c1 == b1 && (c2 > b2 || (c2 == b2 && cl > bl)))) {
                    best = s;
                    b1 = c1;
                    b2 = c2;
                    bl = cl;
                }
            }
            combined += b1;
            wins[best] += 1.0;
        }
        combined /= refs.size();
        CHECK(agg.r1.f1 == doctest::Approx(combined).epsilon(1e-12));
        for (int s = 0; s < 4; ++s)
            CHECK(agg.win_fraction[s] == doctest::Approx(wins[s] / refs.size()));
    }
}

TEST_CASE("aggregate_best rejects misaligned id sets") {
    auto a = make_system("a", {{"1", "boat"}});
    auto b = make_system("b", {{"2", "boat"}});
    auto refs = make_refs({{"1", "boat"}});
    CHECK_THROWS_AS(aggregate_best({a, b}, refs), std::invalid_argument);
    CHECK_THROWS_AS(aggregate_best({a}, refs), std::invalid_argument);
}

TEST_CASE("pairwise matrix: diagonal, dominance, symmetry, hand check") {
    auto a = make_system("a", {{"1", "boat river"}, {"2", "lamp"}});
    auto b = make_system("b", {{"1", "stone"}, {"2", "stone wall"}});
    auto c = make_system("c", {{"1", "boat fort"}, {"2", "moat"}});
    auto refs = make_refs({{"1", "boat river"}, {"2", "stone wall"}});
    const std::vector<SystemOutputs> systems{a, b, c};
    const auto matrix = pairwise_matrix(systems, refs);

    for (size_t i = 0; i < 3; ++i) {
        std::vector<RougeScore> scores;
        for (const auto& [id, ref] : refs)
            scores.push_back(rouge_n(systems[i].outputs.at(id), ref, 1));
        CHECK(matrix[i][i] == doctest::Approx(mean_rouge(scores).f1));
    }
    for (size_t i = 0; i < 3; ++i)
        for (size_t j = i + 1; j < 3; ++j) {
            CHECK(matrix[i][j] == matrix[j][i]);
            CHECK(matrix[i][j] >= matrix[i][i] - 1e-12);
            CHECK(matrix[i][j] >= matrix[j][j] - 1e-12);
            const auto pair_agg = aggregate_best({systems[i], systems[j]}, refs);
            CHECK(matrix[i][j] == doctest::Approx(pair_agg.r1.f1));
        }

    // Hand check cell (a, b): example 1 best is a (1.0), example 2 best is b (1.0).
    CHECK(matrix[0][1] == doctest::Approx(1.0));
}

TEST_CASE("pearson: closed form, degenerate variance, too few pairs") {
    // Hand-computed: x = 1,2,3; y = 2,4,7 -> r ≈ 0.99339927
    const auto r = pearson({{1, 2}, {2, 4}, {3, 7}});
    CHECK(r.defined);
    const double sxy = 3.0 * (1 * 2 + 2 * 4 + 3 * 7) - 6.0 * 13.0;
    const double sxx = 3.0 * 14 - 36.0, syy = 3.0 * 69 - 169.0;
    CHECK(r.r == doctest::Approx(sxy / std::sqrt(sxx * syy)));

    const auto flat = pearson({{1, 2}, {1, 4}, {1, 7}});
    CHECK(!flat.defined);

    CHECK_THROWS_AS(pearson({{1, 2}, {2, 3}}), std::invalid_argument);

    // Perfect positive correlation.
    const auto perfect = pearson({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
    CHECK(perfect.r == doctest::Approx(1.0));
}

TEST_CASE("novelty report trivial directions") {
    Corpus corpus;
    corpus.push_back(make_example("1", "boat river stone lamp", "boat castle"));
    corpus.push_back(make_example("2", "wall fort moat", "wall bridge"));

    // Outputs copied verbatim from the source: zero novelty.
    std::map<std::string, Tokens> copies{{"1", tokenize("boat river stone")},
                                         {"2", tokenize("wall fort")}};
    for (const auto& row : novelty_report(copies, corpus)) {
        CHECK(row.mean_novel_fraction == 0.0);
    }

    // Outputs equal to the references: full novel recall where defined.
    std::map<std::string, Tokens> echoes{{"1", tokenize("boat castle")},
                                         {"2", tokenize("wall bridge")}};
    const auto rows = novelty_report(echoes, corpus);
    CHECK(rows[0].n == 1);
    CHECK(rows[0].mean_novel_recall == doctest::Approx(1.0));
    CHECK(rows[0].mean_novel_fraction > 0.0);

    std::map<std::string, Tokens> unknown{{"zzz", tokenize("boat")}};
    CHECK_THROWS_AS(novelty_report(unknown, corpus), std::invalid_argument);
}

namespace {

struct TinyModel {
    std::shared_ptr<GSumModel> model;
    Vocab vocab;
    Corpus corpus;
    GuidanceConfig gcfg;
    GSumModel::BeamParams beam;
};

TinyModel train_tiny(int steps, uint64_t seed) {
    SyntheticParams params;
    params.seed = seed;
    params.n_examples = 6;
    params.sentences_per_doc = 4;
    params.subset_size = 2;
    TinyModel out;
    out.corpus = make_synthetic_examples(params);
    ExperimentSpec spec;
    spec.model.d_model = 16;
    spec.model.n_heads = 2;
    spec.model.d_ff = 32;
    spec.model.n_enc = 1;
    spec.model.n_dec = 1;
    spec.model.dropout_rate = 0.0;
    spec.model.max_src_len = 64;
    spec.model.max_tgt_len = 24;
    spec.max_steps = steps;
    spec.eval_every = 0;
    spec.seed = seed;
    spec.guidance.n_ext = 2;
    auto result = train(spec, out.corpus, {});
    out.model = result.model;
    out.vocab = result.vocab;
    out.gcfg = spec.guidance;
    out.beam.beam = 1;
    out.beam.max_len = 20;
    return out;
}

}  // namespace

TEST_CASE("controllability halves: skip counting and determinism") {
    auto tiny = train_tiny(10, 41);
    // Single-sentence references are skipped; the synthetic subset_size=2
    // corpus has two-sentence references throughout, so add a short one.
    Corpus mixed = tiny.corpus;
    Example single = make_example("single", "boat was found river. lamp was sold wall.",
                                  "boat was found river.");
    mixed.push_back(single);

    const auto h1 = controllability_halves(*tiny.model, tiny.vocab, mixed,
                                           GuidanceKind::sentences, tiny.gcfg, nullptr,
                                           tiny.beam);
    CHECK(h1.used == static_cast<int>(tiny.corpus.size()));
    CHECK(h1.skipped == 1);

    const auto h2 = controllability_halves(*tiny.model, tiny.vocab, mixed,
                                           GuidanceKind::sentences, tiny.gcfg, nullptr,
                                           tiny.beam);
    for (int g = 0; g < 2; ++g)
        for (int r = 0; r < 2; ++r) CHECK(h1.cell[g][r].f1 == h2.cell[g][r].f1);
}

TEST_CASE("guidance quality correlation: sampling contract") {
    auto tiny = train_tiny(10, 43);
    const auto corr = guidance_quality_correlation(*tiny.model, tiny.vocab, tiny.corpus, 3,
                                                   7, tiny.gcfg, tiny.beam);
    CHECK(corr.n_pairs == static_cast<int>(tiny.corpus.size()) * 3);
    CHECK(corr.pairs.size() == static_cast<size_t>(corr.n_pairs));
    for (const auto& [g, o] : corr.pairs) {
        CHECK(g >= 0.0);
        CHECK(g <= 1.0);
        CHECK(o >= 0.0);
        CHECK(o <= 1.0);
    }

    // Same seed, same pairs.
    const auto again = guidance_quality_correlation(*tiny.model, tiny.vocab, tiny.corpus, 3,
                                                    7, tiny.gcfg, tiny.beam);
    CHECK(corr.pairs == again.pairs);

    // Fewer than 3 pairs rejected.
    Corpus one{tiny.corpus[0]};
    CHECK_THROWS_AS(guidance_quality_correlation(*tiny.model, tiny.vocab, one, 2, 7,
                                                 tiny.gcfg, tiny.beam),
                    std::invalid_argument);

    // Single-sentence documents make guidance quality constant: undefined r.
    Corpus constant;
    for (int i = 0; i < 3; ++i)
        constant.push_back(make_example("c" + std::to_string(i),
                                        "boat was found river stone.",
                                        "boat was found river stone."));
    const auto degenerate = guidance_quality_correlation(*tiny.model, tiny.vocab, constant,
                                                         2, 7, tiny.gcfg, tiny.beam);
    CHECK(!degenerate.defined);
}
