#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gsum/textproc.hpp"

using namespace gsum;

TEST_CASE("tokenize basics") {
    CHECK(tokenize("").empty());
    CHECK(tokenize("   \t\n ").empty());
    CHECK(tokenize("The cat sat.") == Tokens{"the", "cat", "sat", "."});
    CHECK(tokenize("Hello, World!") == Tokens{"hello", ",", "world", "!"});
    CHECK(tokenize("(a)") == Tokens{"(", "a", ")"});
    CHECK(tokenize("don't") == Tokens{"don't"});
    CHECK(tokenize("end.)") == Tokens{"end", ".", ")"});
    CHECK(tokenize("...") == Tokens{".", ".", "."});
    CHECK(tokenize("a..b") == Tokens{"a..b"});
}

TEST_CASE("tokenize is idempotent under re-join") {
    std::mt19937 rng(7);
    const std::string alphabet = "abcXYZ.,!?()'\"- \t";
    std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
    for (int trial = 0; trial < 300; ++trial) {
        std::uniform_int_distribution<int> len(0, 40);
        std::string text;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) text.push_back(alphabet[pick(rng)]);
        const Tokens once = tokenize(text);
        const Tokens twice = tokenize(join_tokens(once));
        CHECK(once == twice);
    }
}

TEST_CASE("split_sentences") {
    CHECK(split_sentences("A b. C d.") == std::vector<std::string>{"A b.", "C d."});
    CHECK(split_sentences("no terminator") == std::vector<std::string>{"no terminator"});
    CHECK(split_sentences("").empty());
    CHECK(split_sentences("Hi! Bye? Done.") ==
          std::vector<std::string>{"Hi!", "Bye?", "Done."});
    // Terminator not followed by whitespace does not split.
    CHECK(split_sentences("a.b c") == std::vector<std::string>{"a.b c"});
    CHECK(split_sentences("  padded.   next.  ") ==
          std::vector<std::string>{"padded.", "next."});
}

TEST_CASE("document tokens equal concatenated sentence tokens") {
    std::mt19937 rng(11);
    const std::vector<std::string> words = {"alpha", "beta",  "gamma", "delta",
                                            "eps",   "zeta.", "eta!",  "theta?"};
    std::uniform_int_distribution<size_t> pick(0, words.size() - 1);
    for (int trial = 0; trial < 100; ++trial) {
        std::string text;
        std::uniform_int_distribution<int> len(1, 25);
        const int n = len(rng);
        for (int i = 0; i < n; ++i) {
            if (i) text += ' ';
            text += words[pick(rng)];
        }
        Tokens whole = tokenize(text);
        Tokens pieces;
        for (const auto& sent : split_sentences(text)) {
            Tokens st = tokenize(sent);
            pieces.insert(pieces.end(), st.begin(), st.end());
        }
        CHECK(whole == pieces);
    }
}

TEST_CASE("ngram_counts") {
    auto bi = ngram_counts({"a", "b", "c"}, 2);
    CHECK(bi.size() == 2);
    CHECK(bi.at("a\nb") == 1);
    CHECK(bi.at("b\nc") == 1);
    CHECK(ngram_counts({"a"}, 2).empty());
    auto uni = ngram_counts({"a", "a"}, 1);
    CHECK(uni.at("a") == 2);
    CHECK_THROWS_AS(ngram_counts({"a"}, 0), std::invalid_argument);
}

TEST_CASE("ngram count identity") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> len(0, 30), n_dist(1, 4), word(0, 4);
    for (int trial = 0; trial < 200; ++trial) {
        Tokens tokens;
        const int n_tokens = len(rng);
        for (int i = 0; i < n_tokens; ++i) tokens.push_back(std::string(1, 'a' + word(rng)));
        const int n = n_dist(rng);
        long long total = 0;
        for (const auto& [g, c] : ngram_counts(tokens, n)) total += c;
        CHECK(total == std::max(0, n_tokens - n + 1));
    }
}

namespace {

Example toy_example(const std::string& id, const std::string& doc, const std::string& sum) {
    Example ex;
    ex.document.id = id;
    ex.document.raw_text = doc;
    for (const auto& s : split_sentences(doc)) ex.document.sentences.push_back(tokenize(s));
    ex.reference = tokenize(sum);
    return ex;
}

}  // namespace

TEST_CASE("vocab build, threshold, truncation") {
    Corpus corpus{toy_example("1", "a a a b.", "a")};
    auto v = Vocab::build(corpus, 2, 1000);
    CHECK(v.contains("a"));
    CHECK(!v.contains("b"));
    CHECK(v.id("b") == Vocab::kUnk);

    auto v_all = Vocab::build(corpus, 1, 1000);
    CHECK(v_all.contains("b"));
    CHECK(v_all.contains("."));

    auto v_trunc = Vocab::build(corpus, 1, Vocab::kNumSpecials + 1);
    CHECK(v_trunc.size() == Vocab::kNumSpecials + 1);
    CHECK(v_trunc.contains("a"));  // most frequent survives

    CHECK_THROWS_AS(Vocab::build({}, 1, 100), std::invalid_argument);
}

TEST_CASE("vocab determinism and ordering") {
    Corpus corpus{toy_example("1", "b b c c a a a.", "z z")};
    auto v1 = Vocab::build(corpus, 1, 1000);
    auto v2 = Vocab::build(corpus, 1, 1000);
    for (int i = 0; i < v1.size(); ++i) CHECK(v1.token(i) == v2.token(i));
    // a:3 first, then the b/c/z tie at 2 resolved lexicographically.
    CHECK(v1.token(Vocab::kNumSpecials) == "a");
    CHECK(v1.token(Vocab::kNumSpecials + 1) == "b");
    CHECK(v1.token(Vocab::kNumSpecials + 2) == "c");
    CHECK(v1.token(Vocab::kNumSpecials + 3) == "z");
}

TEST_CASE("vocab round trip and encode/decode") {
    Corpus corpus{toy_example("1", "boat river stone.", "boat stone")};
    auto v = Vocab::build(corpus, 1, 1000);
    for (int id = Vocab::kNumSpecials; id < v.size(); ++id)
        CHECK(v.id(v.token(id)) == id);
    auto ids = v.encode({"boat", "missing", "stone"});
    CHECK(ids[0] != Vocab::kUnk);
    CHECK(ids[1] == Vocab::kUnk);
    const Tokens back = v.decode(ids, false);
    CHECK(back == Tokens{"boat", "<unk>", "stone"});
}

TEST_CASE("vocab save/load round trip") {
    Corpus corpus{toy_example("1", "boat river stone.", "boat stone")};
    auto v = Vocab::build(corpus, 1, 1000);
    const std::string path = "vocab_test.txt";
    v.save(path);
    auto loaded = Vocab::load(path);
    REQUIRE(loaded.size() == v.size());
    for (int i = 0; i < v.size(); ++i) CHECK(loaded.token(i) == v.token(i));
    std::remove(path.c_str());
}
