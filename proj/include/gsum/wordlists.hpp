#pragma once

#include <string>
#include <unordered_set>

namespace gsum {

// Stopword and verb lists, shipped as plain-text data files with one token
// per line (see data/). Blank lines are ignored.
struct Wordlists {
    std::unordered_set<std::string> stopwords;
    std::unordered_set<std::string> verbs;

    static Wordlists load(const std::string& dir);
    // Loads from the directory compiled in as GSUM_DATA_DIR.
    static const Wordlists& defaults();

    bool is_stopword(const std::string& token) const { return stopwords.count(token) > 0; }
    bool is_verb(const std::string& token) const { return verbs.count(token) > 0; }
};

std::unordered_set<std::string> load_wordlist(const std::string& path);

}  // namespace gsum
