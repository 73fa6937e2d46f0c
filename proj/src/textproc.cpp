#include "gsum/textproc.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <stdexcept>

namespace gsum {

namespace {

bool is_ascii_punct(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return u < 128 && std::ispunct(u);
}

bool is_ws(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return u < 128 && std::isspace(u);
}

char to_lower_ascii(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return u < 128 ? static_cast<char>(std::tolower(u)) : c;
}

}  // namespace

Tokens Document::all_tokens() const {
    Tokens out;
    for (const auto& s : sentences) out.insert(out.end(), s.begin(), s.end());
    return out;
}

Tokens Triple::flattened() const {
    Tokens out = subject;
    out.insert(out.end(), relation.begin(), relation.end());
    out.insert(out.end(), object.begin(), object.end());
    return out;
}

Tokens tokenize(const std::string& text) {
    Tokens out;
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        while (i < n && is_ws(text[i])) ++i;
        if (i >= n) break;
        size_t j = i;
        while (j < n && !is_ws(text[j])) ++j;
        std::string piece = text.substr(i, j - i);
        for (char& c : piece) c = to_lower_ascii(c);

        // Peel leading and trailing punctuation one character at a time,
        // never consuming the final remaining character.
        size_t lo = 0, hi = piece.size();
        while (hi - lo > 1 && is_ascii_punct(piece[lo])) ++lo;
        while (hi - lo > 1 && is_ascii_punct(piece[hi - 1])) --hi;
        for (size_t k = 0; k < lo; ++k) out.push_back(std::string(1, piece[k]));
        out.push_back(piece.substr(lo, hi - lo));
        for (size_t k = hi; k < piece.size(); ++k) out.push_back(std::string(1, piece[k]));
        i = j;
    }
    return out;
}

std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    const size_t n = text.size();
    auto flush = [&]() {
        size_t b = 0, e = cur.size();
        while (b < e && is_ws(cur[b])) ++b;
        while (e > b && is_ws(cur[e - 1])) --e;
        if (e > b) out.push_back(cur.substr(b, e - b));
        cur.clear();
    };
    for (size_t i = 0; i < n; ++i) {
        cur.push_back(text[i]);
        char c = text[i];
        if ((c == '.' || c == '!' || c == '?') && (i + 1 == n || is_ws(text[i + 1]))) {
            flush();
        }
    }
    flush();
    return out;
}

std::unordered_map<std::string, int> ngram_counts(const Tokens& tokens, int n) {
    if (n < 1) throw std::invalid_argument("ngram_counts: n must be >= 1");
    std::unordered_map<std::string, int> counts;
    if (static_cast<int>(tokens.size()) < n) return counts;
    const size_t total = tokens.size() - n + 1;
    counts.reserve(total);
    for (size_t i = 0; i < total; ++i) {
        std::string key = tokens[i];
        for (int k = 1; k < n; ++k) {
            key.push_back('\n');
            key += tokens[i + k];
        }
        ++counts[key];
    }
    return counts;
}

std::string join_tokens(const Tokens& tokens, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += sep;
        out += tokens[i];
    }
    return out;
}

Vocab::Vocab() {
    add_token("<pad>");
    add_token("<unk>");
    add_token("<bos>");
    add_token("<eos>");
    add_token("<sep>");
}

void Vocab::add_token(const std::string& token) {
    token_to_id_.emplace(token, static_cast<int>(id_to_token_.size()));
    id_to_token_.push_back(token);
}

Vocab Vocab::build(const Corpus& corpus, int min_freq, int max_size) {
    if (corpus.empty()) throw std::invalid_argument("Vocab::build: empty corpus");
    if (max_size < kNumSpecials)
        throw std::invalid_argument("Vocab::build: max_size smaller than special tokens");
    std::map<std::string, long long> freq;
    for (const auto& ex : corpus) {
        for (const auto& sent : ex.document.sentences)
            for (const auto& t : sent) ++freq[t];
        for (const auto& t : ex.reference) ++freq[t];
    }
    std::vector<std::pair<std::string, long long>> items(freq.begin(), freq.end());
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    Vocab v;
    for (const auto& [tok, count] : items) {
        if (count < min_freq) continue;
        if (v.size() >= max_size) break;
        v.add_token(tok);
    }
    return v;
}

int Vocab::id(const std::string& token) const {
    auto it = token_to_id_.find(token);
    return it == token_to_id_.end() ? kUnk : it->second;
}

const std::string& Vocab::token(int id) const {
    if (id < 0 || id >= size()) throw std::out_of_range("Vocab::token: id out of range");
    return id_to_token_[static_cast<size_t>(id)];
}

bool Vocab::contains(const std::string& token) const {
    return token_to_id_.count(token) > 0;
}

std::vector<int> Vocab::encode(const Tokens& tokens) const {
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(id(t));
    return ids;
}

Tokens Vocab::decode(const std::vector<int>& ids, bool strip_specials) const {
    Tokens out;
    out.reserve(ids.size());
    for (int i : ids) {
        if (strip_specials && i < kNumSpecials && i != kUnk) continue;
        out.push_back(token(i));
    }
    return out;
}

void Vocab::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("Vocab::save: cannot open " + path);
    for (const auto& t : id_to_token_) f << t << '\n';
}

Vocab Vocab::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("Vocab::load: cannot open " + path);
    Vocab v;
    std::string line;
    int idx = 0;
    while (std::getline(f, line)) {
        if (idx >= kNumSpecials) v.add_token(line);
        ++idx;
    }
    if (idx < kNumSpecials) throw std::runtime_error("Vocab::load: truncated file " + path);
    return v;
}

}  // namespace gsum
