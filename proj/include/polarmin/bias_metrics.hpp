#pragma once

#include "polarmin/lexicon.hpp"

#include "json.hpp"

#include <string_view>
#include <vector>

namespace polarmin {

// Valence-polarity and arousal-floor cutoffs for the framing-bias metric.
// A token counts toward the positive bucket when its valence is at least
// posValenceMin, toward the negative bucket when at most negValenceMax, and
// in either case only when its arousal clears arousalMin.
struct BiasThresholds {
    double posValenceMin = 0.65;
    double negValenceMax = 0.35;
    double arousalMin = 0.0;

    void validate() const; // throws ConfigError
};

// Per-text (or corpus-averaged) arousal sums. Count fields are whole numbers
// for a single text and means after corpus averaging, hence doubles.
struct ArousalReport {
    double arousalPos = 0.0;
    double arousalNeg = 0.0;
    double arousalSum = 0.0;
    double countedPosTokens = 0.0;
    double countedNegTokens = 0.0;
    double totalTokens = 0.0;

    nlohmann::json toJson() const;
    static ArousalReport fromJson(const nlohmann::json& j);
};

// Sums the arousal of lexicon-covered tokens whose valence clears the
// polarity thresholds. Repeated tokens count every occurrence. With
// perTokenNormalize the three sums are divided by the token count.
ArousalReport arousalScores(std::string_view text,
                            const VadLexicon& lexicon,
                            const BiasThresholds& thresholds = {},
                            const TokenizerConfig& tokConfig = {},
                            bool perTokenNormalize = false);

// Field-wise arithmetic mean in sequence order. Throws ConfigError on empty
// input.
ArousalReport corpusArousal(const std::vector<ArousalReport>& reports);

} // namespace polarmin
