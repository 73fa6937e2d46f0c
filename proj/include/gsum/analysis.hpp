#pragma once

#include <map>

#include "gsum/harness.hpp"

namespace gsum {

struct SystemOutputs {
    std::string name;
    std::map<std::string, Tokens> outputs;  // example id -> output tokens
    GuidanceKind kind = GuidanceKind::sentences;
};

using ReferenceMap = std::map<std::string, Tokens>;  // example id -> reference

struct AggregateResult {
    RougeScore r1, r2, rl;  // means of the per-example best picks
    std::vector<std::string> names;
    std::vector<double> win_fraction;
};

// Per example, picks the output with the best R1 F1 (ties: R2, then RL,
// then system order) and averages the winners' scores. All systems must
// cover exactly the same ids.
AggregateResult aggregate_best(const std::vector<SystemOutputs>& systems,
                               const ReferenceMap& refs);

// cell (i, j), j >= i: combined R1 of systems {i, j}; diagonal holds the
// single-system score. Mirrored below the diagonal.
std::vector<std::vector<double>> pairwise_matrix(const std::vector<SystemOutputs>& systems,
                                                 const ReferenceMap& refs);

struct HalvesResult {
    // [guidance half][reference half], mean rouge-1 over used examples.
    RougeScore cell[2][2];
    int used = 0;
    int skipped = 0;  // references with fewer than two sentences
};

// Splits each reference at the sentence midpoint (odd counts: extra
// sentence to the first half), derives oracle guidance from each half,
// decodes under each, and scores every output against every half.
HalvesResult controllability_halves(const GSumModel& model, const Vocab& vocab,
                                    const Corpus& examples, GuidanceKind kind,
                                    const GuidanceConfig& cfg, const RetrievalIndex* index,
                                    const GSumModel::BeamParams& beam);

struct CorrelationResult {
    int n_pairs = 0;
    bool defined = false;  // false when either side has zero variance
    double r = 0.0;
    std::vector<std::pair<double, double>> pairs;  // (guidance R1, output R1)
};

// Samples random sentence subsets of size <= n_ext as guidance, decodes,
// and correlates guidance-vs-reference R1 with output-vs-reference R1.
// Fewer than 3 total pairs is an error.
CorrelationResult guidance_quality_correlation(const GSumModel& model, const Vocab& vocab,
                                               const Corpus& examples,
                                               int samples_per_example, uint64_t seed,
                                               const GuidanceConfig& cfg,
                                               const GSumModel::BeamParams& beam);

// Pearson correlation; throws on fewer than 3 pairs, NaN-free: returns
// {defined=false} on degenerate variance.
CorrelationResult pearson(const std::vector<std::pair<double, double>>& pairs);

struct NoveltyRow {
    int n = 0;
    double mean_novel_fraction = 0.0;
    double mean_novel_recall = 0.0;
};

// Mean novel n-gram stats of the outputs against their source documents
// for n in 1..max_n.
std::vector<NoveltyRow> novelty_report(const std::map<std::string, Tokens>& outputs,
                                       const Corpus& corpus, int max_n = 4);

}  // namespace gsum
