#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace gsum {

using Tokens = std::vector<std::string>;

// A source document split into sentences. Concatenating the sentence token
// sequences in order yields the document token sequence.
struct Document {
    std::string id;
    std::string raw_text;
    std::vector<Tokens> sentences;

    Tokens all_tokens() const;
};

struct Triple {
    Tokens subject;
    Tokens relation;
    Tokens object;

    Tokens flattened() const;
};

// One (document, reference summary) pair. `triples`, when present, bypasses
// the built-in heuristic extractor. `oracle_indices` is the synthetic-corpus
// sidecar field recording the true sentence subset.
struct Example {
    Document document;
    std::string summary_raw;
    Tokens reference;
    std::vector<Tokens> reference_sentences;
    std::optional<std::vector<Triple>> triples;
    std::optional<std::vector<int>> oracle_indices;
};

using Corpus = std::vector<Example>;

// Lowercase, split on whitespace, peel leading/trailing ASCII punctuation
// into separate tokens. Deterministic; empty input gives an empty sequence.
Tokens tokenize(const std::string& text);

// Split after '.', '!' or '?' followed by whitespace or end of text.
// No abbreviation handling. Empty segments are dropped.
std::vector<std::string> split_sentences(const std::string& text);

// Contiguous n-grams with multiplicity, keyed by the tokens joined with
// '\n' (tokens never contain whitespace). Size == max(0, len - n + 1).
std::unordered_map<std::string, int> ngram_counts(const Tokens& tokens, int n);

std::string join_tokens(const Tokens& tokens, const std::string& sep = " ");

class Vocab {
public:
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;
    static constexpr int kBos = 2;
    static constexpr int kEos = 3;
    static constexpr int kSep = 4;
    static constexpr int kNumSpecials = 5;

    Vocab();

    // Tokens with frequency >= min_freq over documents and references, most
    // frequent first, ties lexicographic, truncated to max_size ids total
    // (specials included). max_size must be >= the number of specials.
    static Vocab build(const Corpus& corpus, int min_freq, int max_size);

    int id(const std::string& token) const;  // kUnk when absent
    const std::string& token(int id) const;
    bool contains(const std::string& token) const;
    int size() const { return static_cast<int>(id_to_token_.size()); }

    std::vector<int> encode(const Tokens& tokens) const;
    Tokens decode(const std::vector<int>& ids, bool strip_specials = true) const;

    void save(const std::string& path) const;
    static Vocab load(const std::string& path);

private:
    std::unordered_map<std::string, int> token_to_id_;
    std::vector<std::string> id_to_token_;

    void add_token(const std::string& token);
};

}  // namespace gsum
