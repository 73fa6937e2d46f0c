#include "gsum/rouge.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace gsum {

RougeScore make_rouge(double precision, double recall) {
    RougeScore s;
    s.precision = precision;
    s.recall = recall;
    s.f1 = (precision + recall) > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    return s;
}

RougeScore rouge_n(const Tokens& candidate, const Tokens& reference, int n) {
    if (n < 1) throw std::invalid_argument("rouge_n: n must be >= 1");
    auto cand = ngram_counts(candidate, n);
    auto ref = ngram_counts(reference, n);
    long long cand_total = 0, ref_total = 0, overlap = 0;
    for (const auto& [g, c] : cand) cand_total += c;
    for (const auto& [g, c] : ref) ref_total += c;
    if (cand_total == 0 || ref_total == 0) return RougeScore{};
    for (const auto& [g, c] : cand) {
        auto it = ref.find(g);
        if (it != ref.end()) overlap += std::min(c, it->second);
    }
    return make_rouge(static_cast<double>(overlap) / cand_total,
                      static_cast<double>(overlap) / ref_total);
}

int lcs_length(const Tokens& a, const Tokens& b) {
    const size_t n = a.size(), m = b.size();
    if (n == 0 || m == 0) return 0;
    std::vector<int> prev(m + 1, 0), cur(m + 1, 0);
    for (size_t i = 1; i <= n; ++i) {
        for (size_t j = 1; j <= m; ++j) {
            if (a[i - 1] == b[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

RougeScore rouge_l(const Tokens& candidate, const Tokens& reference) {
    if (candidate.empty() || reference.empty()) return RougeScore{};
    const int lcs = lcs_length(candidate, reference);
    return make_rouge(static_cast<double>(lcs) / candidate.size(),
                      static_cast<double>(lcs) / reference.size());
}

NovelNgramStats novel_ngram_stats(const Tokens& output, const Tokens& source,
                                  const Tokens& reference, int n) {
    if (n < 1) throw std::invalid_argument("novel_ngram_stats: n must be >= 1");
    auto to_set = [n](const Tokens& t) {
        std::unordered_set<std::string> s;
        for (const auto& [g, c] : ngram_counts(t, n)) s.insert(g);
        return s;
    };
    auto out_set = to_set(output);
    auto src_set = to_set(source);
    auto ref_set = to_set(reference);

    NovelNgramStats stats;
    std::unordered_set<std::string> out_novel;
    for (const auto& g : out_set)
        if (!src_set.count(g)) out_novel.insert(g);
    stats.novel_count = static_cast<int>(out_novel.size());
    stats.novel_fraction =
        out_set.empty() ? 0.0 : static_cast<double>(stats.novel_count) / out_set.size();

    int ref_novel = 0, covered = 0;
    for (const auto& g : ref_set) {
        if (src_set.count(g)) continue;
        ++ref_novel;
        if (out_set.count(g)) ++covered;
    }
    stats.novel_recall = ref_novel == 0 ? 0.0 : static_cast<double>(covered) / ref_novel;
    return stats;
}

RougeScore mean_rouge(const std::vector<RougeScore>& scores) {
    RougeScore m;
    if (scores.empty()) return m;
    for (const auto& s : scores) {
        m.precision += s.precision;
        m.recall += s.recall;
        m.f1 += s.f1;
    }
    m.precision /= scores.size();
    m.recall /= scores.size();
    m.f1 /= scores.size();
    return m;
}

}  // namespace gsum
