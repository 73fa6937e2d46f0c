#include "gsum/wordlists.hpp"

#include <fstream>
#include <stdexcept>

namespace gsum {

std::unordered_set<std::string> load_wordlist(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_wordlist: cannot open " + path);
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(f, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) words.insert(line);
    }
    return words;
}

Wordlists Wordlists::load(const std::string& dir) {
    Wordlists w;
    w.stopwords = load_wordlist(dir + "/stopwords.txt");
    w.verbs = load_wordlist(dir + "/verbs.txt");
    return w;
}

const Wordlists& Wordlists::defaults() {
    static const Wordlists w = Wordlists::load(GSUM_DATA_DIR);
    return w;
}

}  // namespace gsum
