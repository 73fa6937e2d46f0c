#include "gsum/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>

namespace gsum {

IndexField index_field_from_string(const std::string& name) {
    if (name == "document") return IndexField::document;
    if (name == "summary") return IndexField::summary;
    throw std::invalid_argument("unknown index field: " + name);
}

std::string to_string(IndexField field) {
    return field == IndexField::document ? "document" : "summary";
}

void RetrievalIndex::finalize() {
    id_to_idx_.clear();
    for (size_t i = 0; i < ids_.size(); ++i) {
        if (!id_to_idx_.emplace(ids_[i], static_cast<int>(i)).second)
            throw std::invalid_argument("RetrievalIndex: duplicate id " + ids_[i]);
    }
    long long total = 0;
    for (int len : doc_len_) total += len;
    avgdl_ = ids_.empty() ? 0.0 : static_cast<double>(total) / ids_.size();
}

RetrievalIndex RetrievalIndex::build(const Corpus& corpus, IndexField field,
                                     Bm25Params params) {
    if (corpus.empty()) throw std::invalid_argument("RetrievalIndex::build: empty corpus");
    RetrievalIndex index;
    index.field_ = field;
    index.params_ = params;
    for (const auto& ex : corpus) {
        const int doc = static_cast<int>(index.ids_.size());
        index.ids_.push_back(ex.document.id);
        index.summaries_.push_back(ex.reference);
        const Tokens tokens =
            field == IndexField::document ? ex.document.all_tokens() : ex.reference;
        index.doc_len_.push_back(static_cast<int>(tokens.size()));
        std::map<std::string, int> tf;
        for (const auto& t : tokens) ++tf[t];
        for (const auto& [term, count] : tf) index.postings_[term].push_back({doc, count});
    }
    index.finalize();
    return index;
}

int RetrievalIndex::doc_freq(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? 0 : static_cast<int>(it->second.size());
}

const Tokens& RetrievalIndex::summary_of(const std::string& id) const {
    auto it = id_to_idx_.find(id);
    if (it == id_to_idx_.end())
        throw std::invalid_argument("RetrievalIndex: unknown id " + id);
    return summaries_[static_cast<size_t>(it->second)];
}

std::vector<RetrievalIndex::Hit> RetrievalIndex::retrieve(const Tokens& query, int k,
                                                          const std::string& exclude_id) const {
    if (k < 1) throw std::invalid_argument("retrieve: k must be >= 1");
    // Distinct query terms in sorted order keep the float accumulation
    // deterministic.
    std::vector<std::string> terms(query.begin(), query.end());
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());

    const double n_docs = static_cast<double>(ids_.size());
    std::vector<double> scores(ids_.size(), 0.0);
    std::vector<char> touched(ids_.size(), 0);
    for (const auto& term : terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const double df = static_cast<double>(it->second.size());
        const double idf = std::log((n_docs - df + 0.5) / (df + 0.5) + 1.0);
        for (const auto& [doc, tf] : it->second) {
            const double norm =
                params_.k1 * (1.0 - params_.b + params_.b * doc_len_[doc] / avgdl_);
            scores[doc] += idf * (tf * (params_.k1 + 1.0)) / (tf + norm);
            touched[doc] = 1;
        }
    }

    std::vector<Hit> hits;
    for (size_t d = 0; d < ids_.size(); ++d) {
        if (!touched[d]) continue;
        if (!exclude_id.empty() && ids_[d] == exclude_id) continue;
        hits.push_back({ids_[d], scores[d]});
    }
    std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (static_cast<int>(hits.size()) > k) hits.resize(static_cast<size_t>(k));
    return hits;
}

// ---------------------------------------------------------------------------
// Persistence. Little-endian, terms sorted for canonical bytes.

namespace {

constexpr char kMagic[4] = {'G', 'I', 'D', 'X'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void write_u64(std::ostream& os, uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void write_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

void write_str(std::ostream& os, const std::string& s) {
    write_u32(os, static_cast<uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void write_tokens(std::ostream& os, const Tokens& tokens) {
    write_u32(os, static_cast<uint32_t>(tokens.size()));
    for (const auto& t : tokens) write_str(os, t);
}

uint32_t read_u32(std::istream& is) {
    uint32_t v;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}

uint64_t read_u64(std::istream& is) {
    uint64_t v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

double read_f64(std::istream& is) {
    double v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

std::string read_str(std::istream& is) {
    const uint32_t len = read_u32(is);
    std::string s(len, '\0');
    is.read(s.data(), len);
    return s;
}

Tokens read_tokens(std::istream& is) {
    const uint32_t count = read_u32(is);
    Tokens out;
    out.reserve(count);
    for (uint32_t i = 0; i < count; ++i) out.push_back(read_str(is));
    return out;
}

}  // namespace

void RetrievalIndex::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("RetrievalIndex::save: cannot open " + path);
    f.write(kMagic, 4);
    write_u32(f, kVersion);
    f.put(field_ == IndexField::document ? 0 : 1);
    write_f64(f, params_.k1);
    write_f64(f, params_.b);
    write_u64(f, ids_.size());
    for (size_t i = 0; i < ids_.size(); ++i) {
        write_str(f, ids_[i]);
        write_u32(f, static_cast<uint32_t>(doc_len_[i]));
        write_tokens(f, summaries_[i]);
    }
    std::vector<std::string> terms;
    terms.reserve(postings_.size());
    for (const auto& [term, plist] : postings_) terms.push_back(term);
    std::sort(terms.begin(), terms.end());
    write_u64(f, terms.size());
    for (const auto& term : terms) {
        const auto& plist = postings_.at(term);
        write_str(f, term);
        write_u32(f, static_cast<uint32_t>(plist.size()));
        for (const auto& [doc, tf] : plist) {
            write_u32(f, static_cast<uint32_t>(doc));
            write_u32(f, static_cast<uint32_t>(tf));
        }
    }
    if (!f) throw std::runtime_error("RetrievalIndex::save: write failed for " + path);
}

RetrievalIndex RetrievalIndex::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("RetrievalIndex::load: cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::string(magic, 4) != std::string(kMagic, 4))
        throw std::runtime_error("RetrievalIndex::load: bad magic in " + path);
    const uint32_t version = read_u32(f);
    if (version != kVersion)
        throw std::runtime_error("RetrievalIndex::load: unsupported version " +
                                 std::to_string(version));
    RetrievalIndex index;
    index.field_ = f.get() == 0 ? IndexField::document : IndexField::summary;
    index.params_.k1 = read_f64(f);
    index.params_.b = read_f64(f);
    const uint64_t n = read_u64(f);
    for (uint64_t i = 0; i < n; ++i) {
        index.ids_.push_back(read_str(f));
        index.doc_len_.push_back(static_cast<int>(read_u32(f)));
        index.summaries_.push_back(read_tokens(f));
    }
    const uint64_t n_terms = read_u64(f);
    for (uint64_t t = 0; t < n_terms; ++t) {
        std::string term = read_str(f);
        const uint32_t df = read_u32(f);
        auto& plist = index.postings_[term];
        plist.reserve(df);
        for (uint32_t i = 0; i < df; ++i) {
            const int doc = static_cast<int>(read_u32(f));
            const int tf = static_cast<int>(read_u32(f));
            plist.push_back({doc, tf});
        }
    }
    if (!f) throw std::runtime_error("RetrievalIndex::load: truncated file " + path);
    index.finalize();
    return index;
}

}  // namespace gsum
