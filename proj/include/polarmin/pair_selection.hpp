#pragma once

#include "polarmin/dataset.hpp"
#include "polarmin/lexicon.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace polarmin {

// Rules for choosing which (source article -> target article) pairs feed the
// polarity loss. Lexical variants rank by valence/arousal distance, Info
// variants by the size of the token-set symmetric difference; LRC variants
// consider the center article as well (as a source only).
enum class SelectionVariant { LrValence, LrArousal, LrInfo, LrcFlipAros, LrcInfo };

std::string variantName(SelectionVariant v);              // "LR-Info" etc.
std::string variantFlag(SelectionVariant v);              // "lr-info" etc.
SelectionVariant parseVariantFlag(std::string_view flag); // throws ConfigError

struct SelectionConfig {
    SelectionVariant variant = SelectionVariant::LrInfo;
    double fraction = 0.5; // keep the top fraction of records, in (0, 1]
};

// One directed training example for the polarity loss. Source and target
// belong to the same record; the target is always a polarity end (L or R).
struct PolarPair {
    std::string recordId;
    Ideology source = Ideology::Left;
    Ideology target = Ideology::Right;
    double distance = 0.0;
    SelectionVariant variant = SelectionVariant::LrInfo;
};

// Size of the symmetric difference of the two texts' token sets
// (multiplicity ignored).
std::size_t uniqueNum(std::string_view a, std::string_view b, const TokenizerConfig& tokConfig = {});

enum class LexicalDimension { Valence, Arousal };

// Absolute difference of the two texts' mean per-token scores in the given
// dimension, over lexicon-covered tokens. A text with no covered tokens
// contributes 0 on its side.
double lexicalDistance(std::string_view a,
                       std::string_view b,
                       const VadLexicon& lexicon,
                       LexicalDimension dimension,
                       const TokenizerConfig& tokConfig = {});

// Ranks records by the variant's distance (globally, ties broken by record id
// ascending), keeps the top ceil(fraction * N), and emits directed pairs.
// LR variants emit both directions per kept record. LRC variants score all
// three combinations, keep each record's maximum, and drop directions whose
// target would be the center article.
std::vector<PolarPair> selectPairs(const std::vector<PolarizedSet>& dataset,
                                   const SelectionConfig& config,
                                   const VadLexicon& lexicon,
                                   const TokenizerConfig& tokConfig = {});

// JSON Lines manifest: one {record_id, source_ideology, target_ideology,
// variant, distance} object per directed pair.
std::string pairsToJsonl(const std::vector<PolarPair>& pairs);
void savePairManifest(const std::string& path, const std::vector<PolarPair>& pairs);
std::vector<PolarPair> loadPairManifest(const std::string& path);

} // namespace polarmin
