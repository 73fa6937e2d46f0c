#pragma once

#include <cstdint>
#include <stdexcept>

#include "gsum/textproc.hpp"

namespace gsum {

struct CorpusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Line-delimited JSON records with fields id, document, summary, optional
// triples ([subject, relation, object] string arrays) and oracle_indices.
// Malformed lines are reported with their line number; duplicate ids and
// empty documents are rejected. `require_reference` additionally rejects
// empty summaries.
Corpus ingest_corpus(const std::string& path, bool require_reference = true);

void write_corpus(const Corpus& corpus, const std::string& path);

// Builds the in-memory example from raw strings (shared by ingest and the
// synthetic generator).
Example make_example(std::string id, std::string document_text, std::string summary_text);

struct SyntheticParams {
    uint64_t seed = 1;
    int n_examples = 200;
    int sentences_per_doc = 6;
    int subset_size = 2;
    double substitution_rate = 0.0;
};

// Documents of random toy-vocabulary sentences; the reference is a random
// subset_size-subset of sentences with tokens swapped for their synonym
// partner with probability substitution_rate. True subset indices are
// recorded in the oracle_indices sidecar field. Same seed, same bytes.
void make_synthetic_corpus(const SyntheticParams& params, const std::string& path);
Corpus make_synthetic_examples(const SyntheticParams& params);

}  // namespace gsum
