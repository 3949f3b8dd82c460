#pragma once

#include "polarmin/dataset.hpp"
#include "polarmin/lexicon.hpp"
#include "polarmin/rng.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace polarmin {

// Shape of the generated corpus. Words come from three lexicon strata:
// neutral (mid valence), negative-biased and positive-biased (valence past
// the cutoffs and arousal at least minBiasArousal).
struct SynthConfig {
    std::size_t numRecords = 100;
    std::size_t coreMinLen = 6;   // shared neutral core, tokens
    std::size_t coreMaxLen = 10;
    std::size_t spanMinLen = 2;   // biased span appended to L and R
    std::size_t spanMaxLen = 6;
    std::size_t centerSpanMaxLen = 2; // center gets a shorter biased span
    bool emitTitles = true;
    // Fraction of reference titles that echo the negative-leaning span's lead
    // word; the rest use the third core word. Headlines sometimes keep loaded
    // framing that the body drops, and sometimes stay flat.
    double titleBiasProb = 0.7;
    double posValenceMin = 0.65;
    double negValenceMax = 0.35;
    double minBiasArousal = 0.5;
    std::string idPrefix = "synth";

    void validate() const; // throws ConfigError
};

// Builds numRecords polarized triplets: every article shares a neutral core
// sentence; L and R append high-arousal spans of opposite valence polarity
// (which side gets which polarity swaps with record parity), the center
// article appends a shorter biased span, and the target is the bare core.
// Throws DataError naming any lexicon stratum that is empty.
std::vector<PolarizedSet> generateSyntheticCorpus(const SynthConfig& config,
                                                  const VadLexicon& lexicon,
                                                  Rng& rng);

} // namespace polarmin
