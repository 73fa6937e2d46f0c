#pragma once

#include <variant>

#include "gsum/textproc.hpp"
#include "gsum/wordlists.hpp"

namespace gsum {

class RetrievalIndex;

enum class GuidanceKind { sentences, keywords, relations, retrieved };

GuidanceKind guidance_kind_from_string(const std::string& name);
std::string to_string(GuidanceKind kind);

// Greedy sentence selection stop rule. `improve` stops as soon as no
// candidate strictly improves the running score; `literal` keeps adding the
// per-round argmax and stops only when the best candidate scores exactly 0.
enum class GreedyMode { improve, literal };

struct SentencesSignal {
    std::vector<int> indices;  // strictly increasing document positions
    std::vector<Tokens> texts;
};

struct KeywordsSignal {
    Tokens words;  // distinct, in rank order
};

struct RelationsSignal {
    std::vector<Triple> triples;
};

struct RetrievedSignal {
    std::vector<Tokens> summaries;
    std::vector<std::string> source_ids;
};

struct GuidanceSignal {
    GuidanceKind kind;
    std::variant<SentencesSignal, KeywordsSignal, RelationsSignal, RetrievedSignal> payload;

    const SentencesSignal& sentences() const { return std::get<SentencesSignal>(payload); }
    const KeywordsSignal& keywords() const { return std::get<KeywordsSignal>(payload); }
    const RelationsSignal& relations() const { return std::get<RelationsSignal>(payload); }
    const RetrievedSignal& retrieved() const { return std::get<RetrievedSignal>(payload); }
};

struct TextRankParams {
    int window = 2;
    double damping = 0.85;
    double tol = 1e-6;
    int max_iters = 100;
};

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

struct GuidanceConfig {
    int n_ext = 3;       // sentence budget
    int n_rel = 3;       // triple budget
    int n_kw = 10;       // keyword cap
    int k_retrieve = 5;  // retrieved summaries
    TextRankParams textrank;
    Bm25Params bm25;
    GreedyMode greedy_mode = GreedyMode::improve;

    void validate() const;
    const Wordlists& wordlists() const;

    // When null, Wordlists::defaults() is used.
    const Wordlists* words = nullptr;
};

struct GreedyStep {
    int index;
    double score_after;  // rouge1 F1 + rouge2 F1 of the selection
};

struct GreedySelection {
    std::vector<int> indices;  // sorted ascending
    std::vector<GreedyStep> steps;
};

// Iteratively adds the sentence maximizing rouge_1.f1 + rouge_2.f1 of the
// selection concatenated in document order against the reference. Strict
// comparison, ties to the lowest index, at most n picks.
GreedySelection greedy_select_trace(const std::vector<Tokens>& sentences,
                                    const Tokens& reference, int n, GreedyMode mode);
std::vector<int> greedy_select_sentences(const Document& doc, const Tokens& reference, int n,
                                         GreedyMode mode = GreedyMode::improve);

struct ScoredWord {
    std::string word;
    double score;
};

// TextRank over the co-occurrence graph of non-stopword tokens: the
// stopword-filtered running sequence is scanned with a sliding window of
// cfg.textrank.window tokens and co-occurring pairs get undirected
// unweighted edges. Output sorted by score descending, ties lexicographic.
std::vector<ScoredWord> textrank_keywords(const std::vector<Tokens>& sentences,
                                          const GuidanceConfig& cfg);

// TextRank over the sentence-similarity graph (cosine over unigram counts).
// Returns all sentence indices ranked by score descending, ties by index.
std::vector<int> textrank_sentences(const std::vector<Tokens>& sentences,
                                    const GuidanceConfig& cfg);

// Greedy sentence selection, then TextRank on the picked sentences, then
// keywords absent from the reference token set dropped, truncated to n_kw.
KeywordsSignal oracle_keywords(const Example& ex, const GuidanceConfig& cfg);

// Naive pattern per sentence: longest stopword-free prefix is the subject,
// the following run of stopwords/verb-list words (which must contain a verb)
// is the relation, and the rest minus edge punctuation is the object.
std::vector<Triple> extract_triples_heuristic(const Document& doc, const Wordlists& words);

// Each triple flattened to subject+relation+object and treated as a
// pseudo-sentence for greedy selection; survivors keep extraction order.
RelationsSignal greedy_select_relations(const std::vector<Triple>& triples,
                                        const Tokens& reference, int m,
                                        GreedyMode mode = GreedyMode::improve);

// Guidance from both the document and the reference (training-time only).
// `index` must be built over summaries and is only consulted for retrieved
// guidance.
GuidanceSignal oracle_guidance(const Example& ex, const RetrievalIndex* index,
                               GuidanceKind kind, const GuidanceConfig& cfg);

// Guidance from the document alone. `index` must be built over documents
// and is only consulted for retrieved guidance. Pre-extracted triples, when
// supplied, bypass the heuristic extractor.
GuidanceSignal auto_guidance(const Document& doc, const RetrievalIndex* index,
                             GuidanceKind kind, const GuidanceConfig& cfg,
                             const std::vector<Triple>* triples = nullptr);

// Flat token rendering of a signal: sentence/summary/triple items joined
// with <sep>, keywords plain.
Tokens guidance_tokens(const GuidanceSignal& signal);

// BOS + tokens + EOS as vocabulary ids, truncated to max_len with the
// terminal EOS always retained; unknown tokens map to UNK.
std::vector<int> render_guidance(const GuidanceSignal& signal, const Vocab& vocab,
                                 int max_len);

}  // namespace gsum
