#pragma once

#include "polarmin/bias_metrics.hpp"
#include "polarmin/lexicon.hpp"

#include "json.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace polarmin {

// Corpus-level BLEU-4: clipped n-gram precisions with an epsilon floor
// (1e-9) for empty numerators, geometric mean over n=1..4, and the standard
// brevity penalty. Identical corpora score exactly 1.0. Hypothesis and
// reference lists must be the same nonzero length.
double corpusBleu(const std::vector<std::string>& hypotheses,
                  const std::vector<std::string>& references,
                  const TokenizerConfig& tokConfig = {});

// Bag-of-tokens F1 between one hypothesis and one reference (multiset
// overlap). Two empty texts score 1.0; exactly one empty scores 0.0. This is
// a lexical proxy for embedding-based salient-information metrics.
double tokenF1(const std::string& hypothesis, const std::string& reference,
               const TokenizerConfig& tokConfig = {});

// Aggregate quality/bias scores for one system's decoded summaries.
struct MetricsReport {
    std::string system;
    std::size_t numExamples = 0;
    ArousalReport arousal;  // corpus mean over hypotheses
    double bleu = 0.0;
    double tokenF1 = 0.0;

    nlohmann::json toJson() const;
    static MetricsReport fromJson(const nlohmann::json& j);
};

// Scores hypotheses against aligned references: mean arousal buckets of the
// hypotheses, corpus BLEU, and mean token-F1. Misaligned or empty lists
// throw DataError.
MetricsReport evaluateSystem(const std::string& systemName,
                             const std::vector<std::string>& hypotheses,
                             const std::vector<std::string>& references,
                             const VadLexicon& lexicon,
                             const BiasThresholds& thresholds = {},
                             const TokenizerConfig& tokConfig = {});

// How pairwise draws enter the sign test: dropped from n, or split evenly
// between both sides (odd draw counts give the extra half to the loser).
enum class DrawPolicy { Exclude, Split };

struct AbTestResult {
    std::size_t wins = 0;   // after draw handling
    std::size_t losses = 0;
    std::size_t draws = 0;  // raw draw count
    std::size_t nEffective = 0;
    double pValue = 1.0;        // one-sided P(X >= wins), X ~ Binomial(n, 1/2)
    std::string exactFraction;  // e.g. "390656/8388608"

    nlohmann::json toJson() const;
};

// Exact one-sided binomial sign test at p=1/2, computed with arbitrary-
// precision integers so the tail is exact for any n.
AbTestResult binomialAbTest(std::size_t wins, std::size_t losses,
                            std::size_t draws, DrawPolicy policy);

// Side-by-side metric deltas; "better" picks the lower arousal values and
// the higher BLEU / token-F1.
nlohmann::json compareSystems(const MetricsReport& a, const MetricsReport& b);
std::string renderComparisonTable(const MetricsReport& a, const MetricsReport& b);

} // namespace polarmin
