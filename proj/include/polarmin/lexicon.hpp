#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace polarmin {

// Per-word Valence-Arousal-Dominance scores, each in [0, 1].
struct VadEntry {
    double valence = 0.0;
    double arousal = 0.0;
    double dominance = 0.0;
};

// Canonical tokenizer settings, shared by scoring, selection and encoding.
// Marker tokens of the form <...> (sentence separators, title markers) are
// never case-folded or stripped so they survive a round trip through text.
struct TokenizerConfig {
    bool lowercase = true;
    bool stripPunctuation = true; // leading/trailing ASCII punctuation only
    bool protectMarkers = true;   // leave <...> tokens untouched
};

// Splits on runs of blank space, case-folds and strips edge punctuation per
// config. Tokens that become empty after stripping are dropped. Order and
// multiplicity are preserved.
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config = {});

// Immutable after load; safe for concurrent readers.
class VadLexicon {
public:
    std::size_t size() const { return entries_.size(); }

    std::optional<VadEntry> lookup(std::string_view token) const;

    // Case-folds the key; last insertion wins and bumps the duplicate count.
    void insert(std::string_view word, VadEntry entry);

    std::size_t duplicateCount() const { return duplicates_; }
    std::size_t skippedRowCount() const { return skippedRows_; }

    const std::unordered_map<std::string, VadEntry>& entries() const { return entries_; }

private:
    friend VadLexicon loadVadLexicon(const std::string& path, bool lenient);

    std::unordered_map<std::string, VadEntry> entries_;
    std::size_t duplicates_ = 0;
    std::size_t skippedRows_ = 0;
};

// Reads a tab-separated word/valence/arousal/dominance file (the public
// NRC-VAD distribution shape). An optional single header row — recognized by
// a non-numeric second column on line 1 — is skipped. Malformed or
// out-of-range rows throw DataError naming the line and field; with
// lenient=true they are skipped and counted instead.
VadLexicon loadVadLexicon(const std::string& path, bool lenient = false);

} // namespace polarmin
