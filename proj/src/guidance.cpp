#include "gsum/guidance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "gsum/bm25.hpp"
#include "gsum/rouge.hpp"

namespace gsum {

GuidanceKind guidance_kind_from_string(const std::string& name) {
    if (name == "sentences") return GuidanceKind::sentences;
    if (name == "keywords") return GuidanceKind::keywords;
    if (name == "relations") return GuidanceKind::relations;
    if (name == "retrieved") return GuidanceKind::retrieved;
    throw std::invalid_argument("unknown guidance kind: " + name);
}

std::string to_string(GuidanceKind kind) {
    switch (kind) {
        case GuidanceKind::sentences: return "sentences";
        case GuidanceKind::keywords: return "keywords";
        case GuidanceKind::relations: return "relations";
        case GuidanceKind::retrieved: return "retrieved";
    }
    return "?";
}

void GuidanceConfig::validate() const {
    if (n_ext < 1 || n_rel < 1 || n_kw < 1 || k_retrieve < 1)
        throw std::invalid_argument("GuidanceConfig: budgets must be >= 1");
    if (!(textrank.damping > 0.0 && textrank.damping < 1.0))
        throw std::invalid_argument("GuidanceConfig: damping must be in (0,1)");
}

const Wordlists& GuidanceConfig::wordlists() const {
    return words ? *words : Wordlists::defaults();
}

// ---------------------------------------------------------------------------
// Greedy oracle selection.

namespace {

double combined_rouge(const Tokens& candidate, const Tokens& reference) {
    return rouge_n(candidate, reference, 1).f1 + rouge_n(candidate, reference, 2).f1;
}

Tokens concat_selected(const std::vector<Tokens>& sentences, const std::vector<bool>& chosen,
                       int extra) {
    Tokens out;
    for (size_t i = 0; i < sentences.size(); ++i)
        if (chosen[i] || static_cast<int>(i) == extra)
            out.insert(out.end(), sentences[i].begin(), sentences[i].end());
    return out;
}

}  // namespace

GreedySelection greedy_select_trace(const std::vector<Tokens>& sentences,
                                    const Tokens& reference, int n, GreedyMode mode) {
    if (n < 1) throw std::invalid_argument("greedy_select: n must be >= 1");
    GreedySelection sel;
    const int count = static_cast<int>(sentences.size());
    std::vector<bool> chosen(count, false);
    double current = 0.0;
    for (int round = 0; round < n; ++round) {
        double best = 0.0;
        int best_idx = -1;
        for (int s = 0; s < count; ++s) {
            if (chosen[s]) continue;
            const double sc = combined_rouge(concat_selected(sentences, chosen, s), reference);
            if (sc > best) {
                best = sc;
                best_idx = s;
            }
        }
        if (best_idx < 0) break;  // every remaining candidate scores 0
        if (mode == GreedyMode::improve && best <= current) break;
        chosen[best_idx] = true;
        current = best;
        sel.steps.push_back({best_idx, best});
    }
    for (int s = 0; s < count; ++s)
        if (chosen[s]) sel.indices.push_back(s);
    return sel;
}

std::vector<int> greedy_select_sentences(const Document& doc, const Tokens& reference, int n,
                                         GreedyMode mode) {
    return greedy_select_trace(doc.sentences, reference, n, mode).indices;
}

// ---------------------------------------------------------------------------
// TextRank.

namespace {

// Unweighted PageRank on an undirected graph given as adjacency lists with
// ascending neighbor ids. Dangling vertices sit at the (1-d)/N fixed point.
std::vector<double> pagerank_unweighted(const std::vector<std::vector<int>>& adj,
                                        const TextRankParams& p) {
    const size_t n = adj.size();
    std::vector<double> score(n, n ? 1.0 / n : 0.0), next(n);
    for (int it = 0; it < p.max_iters; ++it) {
        for (size_t v = 0; v < n; ++v) {
            double flow = 0.0;
            for (int u : adj[v]) flow += score[u] / adj[u].size();
            next[v] = (1.0 - p.damping) / n + p.damping * flow;
        }
        double delta = 0.0;
        for (size_t v = 0; v < n; ++v) delta += std::abs(next[v] - score[v]);
        score.swap(next);
        if (delta < p.tol) break;
    }
    return score;
}

std::vector<double> pagerank_weighted(const std::vector<std::vector<std::pair<int, double>>>& adj,
                                      const TextRankParams& p) {
    const size_t n = adj.size();
    std::vector<double> wsum(n, 0.0);
    for (size_t v = 0; v < n; ++v)
        for (const auto& [u, w] : adj[v]) wsum[v] += w;
    std::vector<double> score(n, n ? 1.0 / n : 0.0), next(n);
    for (int it = 0; it < p.max_iters; ++it) {
        for (size_t v = 0; v < n; ++v) {
            double flow = 0.0;
            for (const auto& [u, w] : adj[v])
                if (wsum[u] > 0.0) flow += w / wsum[u] * score[u];
            next[v] = (1.0 - p.damping) / n + p.damping * flow;
        }
        double delta = 0.0;
        for (size_t v = 0; v < n; ++v) delta += std::abs(next[v] - score[v]);
        score.swap(next);
        if (delta < p.tol) break;
    }
    return score;
}

}  // namespace

std::vector<ScoredWord> textrank_keywords(const std::vector<Tokens>& sentences,
                                          const GuidanceConfig& cfg) {
    const Wordlists& words = cfg.wordlists();
    Tokens running;
    for (const auto& sent : sentences)
        for (const auto& tok : sent)
            if (!words.is_stopword(tok)) running.push_back(tok);
    if (running.empty()) return {};

    // Dense ids in lexicographic order keep the iteration deterministic.
    std::map<std::string, int> vocab;
    for (const auto& tok : running) vocab.emplace(tok, 0);
    int next_id = 0;
    for (auto& [tok, id] : vocab) id = next_id++;

    const int window = std::max(2, cfg.textrank.window);
    std::vector<std::set<int>> edges(vocab.size());
    for (size_t i = 0; i < running.size(); ++i) {
        const int a = vocab[running[i]];
        for (size_t j = i + 1; j < running.size() && j < i + window; ++j) {
            const int b = vocab[running[j]];
            if (a == b) continue;
            edges[a].insert(b);
            edges[b].insert(a);
        }
    }
    std::vector<std::vector<int>> adj(vocab.size());
    for (size_t v = 0; v < edges.size(); ++v) adj[v].assign(edges[v].begin(), edges[v].end());

    const auto score = pagerank_unweighted(adj, cfg.textrank);
    std::vector<ScoredWord> out;
    out.reserve(vocab.size());
    for (const auto& [tok, id] : vocab) out.push_back({tok, score[id]});
    std::stable_sort(out.begin(), out.end(), [](const ScoredWord& a, const ScoredWord& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.word < b.word;
    });
    return out;
}

std::vector<int> textrank_sentences(const std::vector<Tokens>& sentences,
                                    const GuidanceConfig& cfg) {
    const size_t n = sentences.size();
    std::vector<std::map<std::string, int>> counts(n);
    std::vector<double> norm(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        for (const auto& tok : sentences[i]) ++counts[i][tok];
        for (const auto& [tok, c] : counts[i]) norm[i] += static_cast<double>(c) * c;
        norm[i] = std::sqrt(norm[i]);
    }
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            if (norm[i] == 0.0 || norm[j] == 0.0) continue;
            double dot = 0.0;
            for (const auto& [tok, c] : counts[i]) {
                auto it = counts[j].find(tok);
                if (it != counts[j].end()) dot += static_cast<double>(c) * it->second;
            }
            if (dot <= 0.0) continue;
            const double w = dot / (norm[i] * norm[j]);
            adj[i].push_back({static_cast<int>(j), w});
            adj[j].push_back({static_cast<int>(i), w});
        }
    }
    for (auto& row : adj) std::sort(row.begin(), row.end());

    const auto score = pagerank_weighted(adj, cfg.textrank);
    std::vector<int> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (score[a] != score[b]) return score[a] > score[b];
        return a < b;
    });
    return order;
}

// ---------------------------------------------------------------------------

KeywordsSignal oracle_keywords(const Example& ex, const GuidanceConfig& cfg) {
    if (ex.reference.empty()) throw std::invalid_argument("oracle_keywords: empty reference");
    const auto sel =
        greedy_select_trace(ex.document.sentences, ex.reference, cfg.n_ext, cfg.greedy_mode);
    std::vector<Tokens> selected;
    selected.reserve(sel.indices.size());
    for (int idx : sel.indices) selected.push_back(ex.document.sentences[idx]);

    const std::set<std::string> ref_set(ex.reference.begin(), ex.reference.end());
    KeywordsSignal out;
    for (const auto& sw : textrank_keywords(selected, cfg)) {
        if (static_cast<int>(out.words.size()) >= cfg.n_kw) break;
        if (ref_set.count(sw.word)) out.words.push_back(sw.word);
    }
    return out;
}

namespace {

bool all_punct(const std::string& tok) {
    for (char c : tok) {
        unsigned char u = static_cast<unsigned char>(c);
        if (u >= 128 || !std::ispunct(u)) return false;
    }
    return !tok.empty();
}

}  // namespace

std::vector<Triple> extract_triples_heuristic(const Document& doc, const Wordlists& words) {
    std::vector<Triple> out;
    for (const auto& sent : doc.sentences) {
        const int len = static_cast<int>(sent.size());
        int i = 0;
        while (i < len && !words.is_stopword(sent[i])) ++i;
        if (i == 0 || i == len) continue;  // no subject or nothing after it

        int j = i;
        bool has_verb = false;
        while (j < len && (words.is_stopword(sent[j]) || words.is_verb(sent[j]))) {
            if (words.is_verb(sent[j])) has_verb = true;
            ++j;
        }
        if (!has_verb || j == i) continue;

        int lo = j, hi = len;
        while (lo < hi && all_punct(sent[lo])) ++lo;
        while (hi > lo && all_punct(sent[hi - 1])) --hi;
        if (lo >= hi) continue;

        Triple t;
        t.subject.assign(sent.begin(), sent.begin() + i);
        t.relation.assign(sent.begin() + i, sent.begin() + j);
        t.object.assign(sent.begin() + lo, sent.begin() + hi);
        out.push_back(std::move(t));
    }
    return out;
}

RelationsSignal greedy_select_relations(const std::vector<Triple>& triples,
                                        const Tokens& reference, int m, GreedyMode mode) {
    if (m < 1) throw std::invalid_argument("greedy_select_relations: m must be >= 1");
    std::vector<Tokens> pseudo;
    pseudo.reserve(triples.size());
    for (const auto& t : triples) pseudo.push_back(t.flattened());
    RelationsSignal out;
    for (int idx : greedy_select_trace(pseudo, reference, m, mode).indices)
        out.triples.push_back(triples[idx]);
    return out;
}

// ---------------------------------------------------------------------------

GuidanceSignal oracle_guidance(const Example& ex, const RetrievalIndex* index,
                               GuidanceKind kind, const GuidanceConfig& cfg) {
    cfg.validate();
    if (ex.reference.empty()) throw std::invalid_argument("oracle_guidance: empty reference");
    GuidanceSignal sig;
    sig.kind = kind;
    switch (kind) {
        case GuidanceKind::sentences: {
            SentencesSignal s;
            s.indices = greedy_select_sentences(ex.document, ex.reference, cfg.n_ext,
                                                cfg.greedy_mode);
            for (int idx : s.indices) s.texts.push_back(ex.document.sentences[idx]);
            sig.payload = std::move(s);
            break;
        }
        case GuidanceKind::keywords:
            sig.payload = oracle_keywords(ex, cfg);
            break;
        case GuidanceKind::relations: {
            const std::vector<Triple> triples =
                ex.triples ? *ex.triples : extract_triples_heuristic(ex.document, cfg.wordlists());
            sig.payload = greedy_select_relations(triples, ex.reference, cfg.n_rel,
                                                  cfg.greedy_mode);
            break;
        }
        case GuidanceKind::retrieved: {
            if (!index) throw std::invalid_argument("oracle_guidance: retrieval index required");
            if (index->field() != IndexField::summary)
                throw std::invalid_argument(
                    "oracle_guidance: retrieved guidance needs a summary-field index");
            RetrievedSignal r;
            for (const auto& hit : index->retrieve(ex.reference, cfg.k_retrieve,
                                                   ex.document.id)) {
                r.source_ids.push_back(hit.id);
                r.summaries.push_back(index->summary_of(hit.id));
            }
            sig.payload = std::move(r);
            break;
        }
    }
    return sig;
}

GuidanceSignal auto_guidance(const Document& doc, const RetrievalIndex* index,
                             GuidanceKind kind, const GuidanceConfig& cfg,
                             const std::vector<Triple>* triples) {
    cfg.validate();
    GuidanceSignal sig;
    sig.kind = kind;
    switch (kind) {
        case GuidanceKind::sentences: {
            SentencesSignal s;
            const auto ranking = textrank_sentences(doc.sentences, cfg);
            const int take = std::min<int>(cfg.n_ext, static_cast<int>(ranking.size()));
            s.indices.assign(ranking.begin(), ranking.begin() + take);
            std::sort(s.indices.begin(), s.indices.end());
            for (int idx : s.indices) s.texts.push_back(doc.sentences[idx]);
            sig.payload = std::move(s);
            break;
        }
        case GuidanceKind::keywords: {
            KeywordsSignal k;
            for (const auto& sw : textrank_keywords(doc.sentences, cfg)) {
                if (static_cast<int>(k.words.size()) >= cfg.n_kw) break;
                k.words.push_back(sw.word);
            }
            sig.payload = std::move(k);
            break;
        }
        case GuidanceKind::relations: {
            const std::vector<Triple> extracted =
                triples ? *triples : extract_triples_heuristic(doc, cfg.wordlists());
            // Rank by clipped unigram overlap with the lead n_ext sentences.
            Tokens lead;
            for (size_t i = 0; i < doc.sentences.size() && i < static_cast<size_t>(cfg.n_ext); ++i)
                lead.insert(lead.end(), doc.sentences[i].begin(), doc.sentences[i].end());
            const auto lead_counts = ngram_counts(lead, 1);
            std::vector<std::pair<long long, int>> ranked;  // (-overlap, index)
            for (size_t t = 0; t < extracted.size(); ++t) {
                long long overlap = 0;
                for (const auto& [g, c] : ngram_counts(extracted[t].flattened(), 1)) {
                    auto it = lead_counts.find(g);
                    if (it != lead_counts.end()) overlap += std::min(c, it->second);
                }
                ranked.push_back({-overlap, static_cast<int>(t)});
            }
            std::sort(ranked.begin(), ranked.end());
            std::vector<int> keep;
            for (size_t t = 0; t < ranked.size() && t < static_cast<size_t>(cfg.n_rel); ++t)
                keep.push_back(ranked[t].second);
            std::sort(keep.begin(), keep.end());
            RelationsSignal r;
            for (int idx : keep) r.triples.push_back(extracted[idx]);
            sig.payload = std::move(r);
            break;
        }
        case GuidanceKind::retrieved: {
            if (!index) throw std::invalid_argument("auto_guidance: retrieval index required");
            if (index->field() != IndexField::document)
                throw std::invalid_argument(
                    "auto_guidance: retrieved guidance needs a document-field index");
            RetrievedSignal r;
            for (const auto& hit : index->retrieve(doc.all_tokens(), cfg.k_retrieve, doc.id)) {
                r.source_ids.push_back(hit.id);
                r.summaries.push_back(index->summary_of(hit.id));
            }
            sig.payload = std::move(r);
            break;
        }
    }
    return sig;
}

// ---------------------------------------------------------------------------

namespace {
const std::string kSepToken = "<sep>";

void append_joined(Tokens& out, const std::vector<Tokens>& items) {
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out.push_back(kSepToken);
        out.insert(out.end(), items[i].begin(), items[i].end());
    }
}
}  // namespace

Tokens guidance_tokens(const GuidanceSignal& signal) {
    Tokens out;
    switch (signal.kind) {
        case GuidanceKind::sentences:
            append_joined(out, signal.sentences().texts);
            break;
        case GuidanceKind::keywords:
            out = signal.keywords().words;
            break;
        case GuidanceKind::relations: {
            std::vector<Tokens> flat;
            for (const auto& t : signal.relations().triples) flat.push_back(t.flattened());
            append_joined(out, flat);
            break;
        }
        case GuidanceKind::retrieved:
            append_joined(out, signal.retrieved().summaries);
            break;
    }
    return out;
}

std::vector<int> render_guidance(const GuidanceSignal& signal, const Vocab& vocab,
                                 int max_len) {
    if (max_len < 1) throw std::invalid_argument("render_guidance: max_len must be >= 1");
    std::vector<int> ids;
    ids.push_back(Vocab::kBos);
    for (const auto& tok : guidance_tokens(signal)) ids.push_back(vocab.id(tok));
    ids.push_back(Vocab::kEos);
    if (static_cast<int>(ids.size()) > max_len) {
        ids.resize(max_len);
        ids.back() = Vocab::kEos;
    }
    return ids;
}

}  // namespace gsum
