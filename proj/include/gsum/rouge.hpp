#pragma once

#include "gsum/textproc.hpp"

namespace gsum {

struct RougeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

RougeScore make_rouge(double precision, double recall);

// Clipped n-gram overlap. P = overlap / |candidate n-grams|,
// R = overlap / |reference n-grams|. All zero when either side is empty.
RougeScore rouge_n(const Tokens& candidate, const Tokens& reference, int n);

// Token-level longest common subsequence over the full sequences.
RougeScore rouge_l(const Tokens& candidate, const Tokens& reference);

int lcs_length(const Tokens& a, const Tokens& b);

struct NovelNgramStats {
    int novel_count = 0;        // distinct output n-grams absent from source
    double novel_fraction = 0;  // novel_count / |distinct output n-grams|
    double novel_recall = 0;    // covered reference-novel n-grams / all reference-novel
};

NovelNgramStats novel_ngram_stats(const Tokens& output, const Tokens& source,
                                  const Tokens& reference, int n);

// Corpus-level score: arithmetic mean of per-example F1 (precision and
// recall averaged the same way).
RougeScore mean_rouge(const std::vector<RougeScore>& scores);

}  // namespace gsum
