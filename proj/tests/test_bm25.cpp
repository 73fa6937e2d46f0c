#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "gsum/bm25.hpp"

using namespace gsum;

namespace {

Example make_ex(const std::string& id, const std::string& doc, const std::string& sum) {
    Example ex;
    ex.document.id = id;
    ex.document.raw_text = doc;
    for (const auto& s : split_sentences(doc)) ex.document.sentences.push_back(tokenize(s));
    ex.summary_raw = sum;
    ex.reference = tokenize(sum);
    return ex;
}

// Closed-form BM25 evaluated from scratch.
double bm25_score(const Tokens& query, const Tokens& doc, double n_docs,
                  const std::map<std::string, int>& df, double avgdl, const Bm25Params& p) {
    std::map<std::string, int> tf;
    for (const auto& t : doc) ++tf[t];
    std::map<std::string, bool> seen;
    double score = 0.0;
    for (const auto& term : query) {
        if (seen[term]) continue;
        seen[term] = true;
        auto it = tf.find(term);
        if (it == tf.end()) continue;
        const double d = df.count(term) ? df.at(term) : 0;
        const double idf = std::log((n_docs - d + 0.5) / (d + 0.5) + 1.0);
        const double denom = it->second + p.k1 * (1.0 - p.b + p.b * doc.size() / avgdl);
        score += idf * (it->second * (p.k1 + 1.0)) / denom;
    }
    return score;
}

}  // namespace

TEST_CASE("one-example corpus returns that example or nothing") {
    Corpus corpus{make_ex("only", "boat river stone.", "boat summary")};
    auto index = RetrievalIndex::build(corpus, IndexField::document, {});
    auto hits = index.retrieve(tokenize("boat"), 5);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].id == "only");
    CHECK(index.retrieve(tokenize("zebra"), 5).empty());
}

TEST_CASE("rebuild determinism") {
    Corpus corpus{make_ex("a", "boat river.", "s a"), make_ex("b", "boat stone.", "s b"),
                  make_ex("c", "stone lamp garden.", "s c")};
    auto i1 = RetrievalIndex::build(corpus, IndexField::document, {});
    auto i2 = RetrievalIndex::build(corpus, IndexField::document, {});
    const Tokens query = tokenize("boat stone lamp");
    auto h1 = i1.retrieve(query, 3);
    auto h2 = i2.retrieve(query, 3);
    REQUIRE(h1.size() == h2.size());
    for (size_t i = 0; i < h1.size(); ++i) {
        CHECK(h1[i].id == h2[i].id);
        CHECK(h1[i].score == h2[i].score);
    }
}

TEST_CASE("single-term scores match the closed-form formula") {
    Corpus corpus{make_ex("a", "boat boat river.", "s"), make_ex("b", "boat stone.", "s"),
                  make_ex("c", "stone lamp garden wall.", "s")};
    Bm25Params p;
    auto index = RetrievalIndex::build(corpus, IndexField::document, p);

    std::map<std::string, int> df;
    std::vector<Tokens> docs;
    double total_len = 0.0;
    for (const auto& ex : corpus) {
        docs.push_back(ex.document.all_tokens());
        total_len += docs.back().size();
        std::map<std::string, bool> seen;
        for (const auto& t : docs.back())
            if (!seen[t]) {
                seen[t] = true;
                ++df[t];
            }
    }
    const double avgdl = total_len / docs.size();
    CHECK(index.avg_len() == doctest::Approx(avgdl));
    CHECK(index.doc_freq("boat") == 2);
    CHECK(index.doc_freq("zebra") == 0);

    const Tokens query = tokenize("boat");
    auto hits = index.retrieve(query, 3);
    REQUIRE(hits.size() == 2);
    for (const auto& hit : hits) {
        const size_t d = hit.id == "a" ? 0 : 1;
        const double want = bm25_score(query, docs[d], 3.0, df, avgdl, p);
        CHECK(hit.score == doctest::Approx(want).epsilon(1e-12));
    }
    // tf = 2 in "a" beats tf = 1 in the shorter "b"? Verify ordering matches
    // the formula rather than guessing.
    const double sa = bm25_score(query, docs[0], 3.0, df, avgdl, p);
    const double sb = bm25_score(query, docs[1], 3.0, df, avgdl, p);
    CHECK(hits[0].score == doctest::Approx(std::max(sa, sb)));
}

TEST_CASE("ranking matches exhaustive scoring on a 5-doc corpus") {
    Corpus corpus{make_ex("a", "boat river stone garden.", "s"),
                  make_ex("b", "boat boat lamp.", "s"),
                  make_ex("c", "stone stone lamp wall fort.", "s"),
                  make_ex("d", "river lamp.", "s"),
                  make_ex("e", "castle moat.", "s")};
    Bm25Params p;
    auto index = RetrievalIndex::build(corpus, IndexField::document, p);

    std::map<std::string, int> df;
    std::vector<Tokens> docs;
    double total_len = 0.0;
    for (const auto& ex : corpus) {
        docs.push_back(ex.document.all_tokens());
        total_len += docs.back().size();
        std::map<std::string, bool> seen;
        for (const auto& t : docs.back())
            if (!seen[t]) {
                seen[t] = true;
                ++df[t];
            }
    }
    const double avgdl = total_len / docs.size();
    const Tokens query = tokenize("boat lamp");

    std::vector<std::pair<double, std::string>> want;
    const std::vector<std::string> ids = {"a", "b", "c", "d", "e"};
    for (size_t i = 0; i < docs.size(); ++i) {
        const double s = bm25_score(query, docs[i], 5.0, df, avgdl, p);
        if (s > 0.0) want.push_back({-s, ids[i]});
    }
    std::sort(want.begin(), want.end());

    auto hits = index.retrieve(query, 10);
    REQUIRE(hits.size() == want.size());
    for (size_t i = 0; i < hits.size(); ++i) {
        CHECK(hits[i].id == want[i].second);
        CHECK(hits[i].score == doctest::Approx(-want[i].first).epsilon(1e-12));
        if (i) CHECK(hits[i].score <= hits[i - 1].score);  // non-increasing
    }
}

TEST_CASE("summary index and self-exclusion") {
    Corpus corpus{make_ex("a", "boat doc.", "boat river stone"),
                  make_ex("b", "lamp doc.", "lamp garden wall"),
                  make_ex("c", "misc doc.", "castle fort moat")};
    auto index = RetrievalIndex::build(corpus, IndexField::summary, {});

    auto hits = index.retrieve(tokenize("boat river stone"), 1);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].id == "a");

    auto excluded = index.retrieve(tokenize("boat river stone"), 5, "a");
    for (const auto& hit : excluded) CHECK(hit.id != "a");

    CHECK(index.summary_of("b") == tokenize("lamp garden wall"));
    CHECK_THROWS_AS(index.summary_of("zzz"), std::invalid_argument);
}

TEST_CASE("save/load round trip preserves scores bit-for-bit") {
    Corpus corpus{make_ex("a", "boat river stone garden.", "sum a"),
                  make_ex("b", "boat boat lamp.", "sum b"),
                  make_ex("c", "stone lamp wall.", "sum c")};
    auto index = RetrievalIndex::build(corpus, IndexField::document, {});
    const std::string path = "bm25_test.idx";
    index.save(path);
    auto loaded = RetrievalIndex::load(path);
    CHECK(loaded.field() == IndexField::document);
    CHECK(loaded.num_docs() == 3);
    CHECK(loaded.avg_len() == index.avg_len());

    const Tokens query = tokenize("boat stone lamp");
    auto h1 = index.retrieve(query, 5);
    auto h2 = loaded.retrieve(query, 5);
    REQUIRE(h1.size() == h2.size());
    for (size_t i = 0; i < h1.size(); ++i) {
        CHECK(h1[i].id == h2[i].id);
        CHECK(h1[i].score == h2[i].score);  // exact
    }
    CHECK(loaded.summary_of("a") == tokenize("sum a"));
    std::remove(path.c_str());

    CHECK_THROWS(RetrievalIndex::load("missing_file.idx"));
}

TEST_CASE("duplicate ids rejected at build") {
    Corpus corpus{make_ex("same", "boat.", "s"), make_ex("same", "lamp.", "s")};
    CHECK_THROWS_AS(RetrievalIndex::build(corpus, IndexField::document, {}),
                    std::invalid_argument);
}
