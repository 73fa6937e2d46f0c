#pragma once

#include "gsum/guidance.hpp"
#include "gsum/textproc.hpp"

namespace gsum {

enum class IndexField { document, summary };

IndexField index_field_from_string(const std::string& name);
std::string to_string(IndexField field);

// Immutable BM25 index over one field of a corpus. Safe for concurrent
// queries once built. Each entry also carries the example's summary tokens,
// the payload handed out as retrieved-summary guidance.
class RetrievalIndex {
public:
    struct Hit {
        std::string id;
        double score;
    };

    static RetrievalIndex build(const Corpus& corpus, IndexField field, Bm25Params params);

    // Top-k by score descending, ties by id ascending; exclude_id (when
    // non-empty) is never returned. Documents sharing no term with the
    // query are not candidates, so fewer than k hits may come back.
    std::vector<Hit> retrieve(const Tokens& query, int k,
                              const std::string& exclude_id = "") const;

    const Tokens& summary_of(const std::string& id) const;

    IndexField field() const { return field_; }
    size_t num_docs() const { return ids_.size(); }
    double avg_len() const { return avgdl_; }
    int doc_len(size_t idx) const { return doc_len_[idx]; }
    int doc_freq(const std::string& term) const;
    const Bm25Params& params() const { return params_; }

    // Versioned binary file: magic, version, field tag, stats, postings.
    void save(const std::string& path) const;
    static RetrievalIndex load(const std::string& path);

private:
    IndexField field_ = IndexField::document;
    Bm25Params params_;
    std::vector<std::string> ids_;
    std::vector<int> doc_len_;
    std::vector<Tokens> summaries_;
    double avgdl_ = 0.0;
    // term -> (doc index, term frequency), doc indices ascending
    std::unordered_map<std::string, std::vector<std::pair<int, int>>> postings_;
    std::unordered_map<std::string, int> id_to_idx_;

    void finalize();
};

}  // namespace gsum
