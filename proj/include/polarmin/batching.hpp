#pragma once

#include "polarmin/dataset.hpp"
#include "polarmin/rng.hpp"
#include "polarmin/vocab.hpp"

#include <string>
#include <utility>
#include <vector>

namespace polarmin {

enum class BatchKind { Mds, Polar };

// A PAD-filled id matrix pair. Rows end their true content with EOS; PAD
// appears only after it. True lengths (BOS and EOS included) are kept per
// row so kernels can skip the padding entirely.
struct Batch {
    BatchKind kind = BatchKind::Mds;
    std::vector<std::vector<int>> inputIds;  // batch x width, PAD-filled
    std::vector<std::vector<int>> targetIds;
    std::vector<std::size_t> inputLengths;
    std::vector<std::size_t> targetLengths;

    std::size_t size() const { return inputIds.size(); }
};

// "<title> t... <article> w..." when titles are on (and a title exists),
// otherwise the bare text.
std::string renderArticle(const Article& article, bool useTitles);

// The article's words in the marker-free space decoding produces: title words
// (when enabled and present) followed by the body, with no structural tokens.
// Use this to build references that are comparable with decoded hypotheses.
std::string referenceText(const Article& article, bool useTitles);

// Concatenates the three articles in a uniformly random order, separated by
// the <sep> marker. The permutation is drawn from the given stream.
std::string buildMdsInput(const PolarizedSet& record, bool useTitles, Rng& rng);

// Shuffles example order, encodes both sides, groups into batches of
// batchSize (last one may be smaller) and PAD-fills rows to the batch-local
// maximum length.
std::vector<Batch> buildBatches(const std::vector<std::pair<std::string, std::string>>& examples,
                                BatchKind kind,
                                const Vocab& vocab,
                                std::size_t batchSize,
                                std::size_t maxInLen,
                                std::size_t maxOutLen,
                                Rng& rng,
                                const TokenizerConfig& tokConfig = {});

} // namespace polarmin
