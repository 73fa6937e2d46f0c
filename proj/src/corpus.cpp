#include "gsum/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <unordered_set>

#include <json.hpp>

namespace gsum {

using nlohmann::json;

Example make_example(std::string id, std::string document_text, std::string summary_text) {
    Example ex;
    ex.document.id = std::move(id);
    ex.document.raw_text = std::move(document_text);
    for (const auto& sent : split_sentences(ex.document.raw_text)) {
        Tokens toks = tokenize(sent);
        if (!toks.empty()) ex.document.sentences.push_back(std::move(toks));
    }
    ex.summary_raw = std::move(summary_text);
    ex.reference = tokenize(ex.summary_raw);
    for (const auto& sent : split_sentences(ex.summary_raw)) {
        Tokens toks = tokenize(sent);
        if (!toks.empty()) ex.reference_sentences.push_back(std::move(toks));
    }
    return ex;
}

namespace {

[[noreturn]] void fail(size_t line_no, const std::string& what) {
    throw CorpusError("line " + std::to_string(line_no) + ": " + what);
}

std::string require_string(const json& record, const char* field, size_t line_no) {
    auto it = record.find(field);
    if (it == record.end()) fail(line_no, std::string("missing field \"") + field + "\"");
    if (!it->is_string()) fail(line_no, std::string("field \"") + field + "\" is not a string");
    return it->get<std::string>();
}

}  // namespace

Corpus ingest_corpus(const std::string& path, bool require_reference) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw CorpusError("cannot open corpus file " + path);
    Corpus corpus;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            fail(line_no, std::string("malformed JSON: ") + e.what());
        }
        if (!record.is_object()) fail(line_no, "record is not a JSON object");

        Example ex = make_example(require_string(record, "id", line_no),
                                  require_string(record, "document", line_no),
                                  require_string(record, "summary", line_no));
        if (ex.document.id.empty()) fail(line_no, "empty id");
        if (!seen_ids.insert(ex.document.id).second)
            fail(line_no, "duplicate id \"" + ex.document.id + "\"");
        if (ex.document.sentences.empty()) fail(line_no, "empty document");
        if (require_reference && ex.reference.empty()) fail(line_no, "empty summary");

        if (auto it = record.find("triples"); it != record.end()) {
            if (!it->is_array()) fail(line_no, "field \"triples\" is not an array");
            std::vector<Triple> triples;
            for (const auto& entry : *it) {
                if (!entry.is_array() || entry.size() != 3)
                    fail(line_no, "triple is not a [subject, relation, object] array");
                Triple t;
                t.subject = tokenize(entry[0].get<std::string>());
                t.relation = tokenize(entry[1].get<std::string>());
                t.object = tokenize(entry[2].get<std::string>());
                if (t.subject.empty() || t.relation.empty() || t.object.empty())
                    fail(line_no, "triple has an empty component");
                triples.push_back(std::move(t));
            }
            ex.triples = std::move(triples);
        }
        if (auto it = record.find("oracle_indices"); it != record.end()) {
            if (!it->is_array()) fail(line_no, "field \"oracle_indices\" is not an array");
            std::vector<int> idx;
            for (const auto& entry : *it) idx.push_back(entry.get<int>());
            ex.oracle_indices = std::move(idx);
        }
        corpus.push_back(std::move(ex));
    }
    return corpus;
}

void write_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw CorpusError("cannot open output file " + path);
    for (const auto& ex : corpus) {
        json record;
        record["id"] = ex.document.id;
        record["document"] = ex.document.raw_text;
        record["summary"] = ex.summary_raw;
        if (ex.triples) {
            json triples = json::array();
            for (const auto& t : *ex.triples)
                triples.push_back({join_tokens(t.subject), join_tokens(t.relation),
                                   join_tokens(t.object)});
            record["triples"] = std::move(triples);
        }
        if (ex.oracle_indices) record["oracle_indices"] = *ex.oracle_indices;
        f << record.dump() << '\n';
    }
    if (!f) throw CorpusError("write failed for " + path);
}

// ---------------------------------------------------------------------------
// Synthetic corpus.

namespace {

// Synonym pairs: substitution swaps a word for its partner.
const std::vector<std::pair<std::string, std::string>>& synonym_pairs() {
    static const std::vector<std::pair<std::string, std::string>> pairs = {
        {"boat", "ship"},     {"stone", "rock"},    {"street", "road"},
        {"forest", "woods"},  {"house", "home"},    {"child", "kid"},
        {"ocean", "sea"},     {"mountain", "peak"}, {"doctor", "medic"},
        {"teacher", "tutor"}, {"song", "tune"},     {"storm", "gale"},
        {"bridge", "span"},   {"garden", "yard"},   {"letter", "note"},
        {"market", "bazaar"}, {"dog", "hound"},     {"coat", "jacket"},
        {"meal", "dinner"},   {"lamp", "lantern"},  {"field", "meadow"},
        {"river", "stream"},  {"castle", "fort"},   {"wagon", "cart"},
    };
    return pairs;
}

const std::vector<std::string>& aux_words() {
    static const std::vector<std::string> words = {"was", "is", "were", "are"};
    return words;
}

const std::vector<std::string>& participles() {
    static const std::vector<std::string> words = {"found", "made", "seen",
                                                   "held",  "sold", "built"};
    return words;
}

}  // namespace

Corpus make_synthetic_examples(const SyntheticParams& params) {
    if (params.subset_size < 1 || params.subset_size > params.sentences_per_doc)
        throw std::invalid_argument("make_synthetic_corpus: subset_size must be in [1, sentences_per_doc]");
    if (params.n_examples < 1 || params.sentences_per_doc < 1)
        throw std::invalid_argument("make_synthetic_corpus: counts must be >= 1");

    std::vector<std::string> content;
    std::unordered_map<std::string, std::string> partner;
    for (const auto& [a, b] : synonym_pairs()) {
        content.push_back(a);
        content.push_back(b);
        partner[a] = b;
        partner[b] = a;
    }

    std::mt19937_64 rng(params.seed);
    std::uniform_int_distribution<int> word_dist(0, static_cast<int>(content.size()) - 1);
    std::uniform_int_distribution<int> len_dist(4, 6);
    std::uniform_int_distribution<int> aux_dist(0, static_cast<int>(aux_words().size()) - 1);
    std::uniform_int_distribution<int> part_dist(0, static_cast<int>(participles().size()) - 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // Subject words, then "aux participle", then object words, then ".".
    auto make_sentence = [&]() {
        const int len = len_dist(rng);
        const int split = std::uniform_int_distribution<int>(1, len - 1)(rng);
        Tokens sent;
        for (int i = 0; i < split; ++i) sent.push_back(content[word_dist(rng)]);
        sent.push_back(aux_words()[aux_dist(rng)]);
        sent.push_back(participles()[part_dist(rng)]);
        for (int i = split; i < len; ++i) sent.push_back(content[word_dist(rng)]);
        sent.push_back(".");
        return sent;
    };

    Corpus corpus;
    for (int e = 0; e < params.n_examples; ++e) {
        std::vector<Tokens> sentences;
        std::set<Tokens> unique;
        while (static_cast<int>(sentences.size()) < params.sentences_per_doc) {
            Tokens sent = make_sentence();
            if (unique.insert(sent).second) sentences.push_back(std::move(sent));
        }

        std::vector<int> indices(sentences.size());
        for (size_t i = 0; i < indices.size(); ++i) indices[i] = static_cast<int>(i);
        for (size_t i = indices.size() - 1; i > 0; --i) {
            std::uniform_int_distribution<size_t> pick(0, i);
            std::swap(indices[i], indices[pick(rng)]);
        }
        indices.resize(static_cast<size_t>(params.subset_size));
        std::sort(indices.begin(), indices.end());

        std::vector<std::string> ref_sents;
        for (int idx : indices) {
            Tokens sent = sentences[static_cast<size_t>(idx)];
            for (auto& tok : sent) {
                auto it = partner.find(tok);
                if (it != partner.end() && unif(rng) < params.substitution_rate)
                    tok = it->second;
            }
            ref_sents.push_back(join_tokens(sent));
        }

        std::vector<std::string> doc_sents;
        for (const auto& sent : sentences) doc_sents.push_back(join_tokens(sent));

        char id[32];
        std::snprintf(id, sizeof(id), "syn-%04d", e);
        Example ex = make_example(id, join_tokens(doc_sents), join_tokens(ref_sents));
        ex.oracle_indices = indices;
        corpus.push_back(std::move(ex));
    }
    return corpus;
}

void make_synthetic_corpus(const SyntheticParams& params, const std::string& path) {
    write_corpus(make_synthetic_examples(params), path);
}

}  // namespace gsum
