#include "polarmin/batching.hpp"

#include "polarmin/errors.hpp"

#include <algorithm>
#include <numeric>

namespace polarmin {

std::string renderArticle(const Article& article, bool useTitles) {
    if (!useTitles || article.title.empty()) {
        return article.text;
    }
    std::string out;
    out.reserve(article.title.size() + article.text.size() + 20);
    out += Vocab::kTitleToken;
    out += ' ';
    out += article.title;
    out += ' ';
    out += Vocab::kArticleToken;
    out += ' ';
    out += article.text;
    return out;
}

std::string referenceText(const Article& article, bool useTitles) {
    if (!useTitles || article.title.empty()) {
        return article.text;
    }
    // Same words as the rendered article but without the structural markers,
    // which decoding strips from hypotheses; references must live in the same
    // marker-free space or token overlap metrics would be biased.
    return article.title + ' ' + article.text;
}

std::string buildMdsInput(const PolarizedSet& record, bool useTitles, Rng& rng) {
    std::vector<const Article*> order = {&record.left, &record.right, &record.center};
    rng.shuffle(order);
    std::string out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i > 0) {
            out += ' ';
            out += Vocab::kSepToken;
            out += ' ';
        }
        out += renderArticle(*order[i], useTitles);
    }
    return out;
}

std::vector<Batch> buildBatches(const std::vector<std::pair<std::string, std::string>>& examples,
                                BatchKind kind,
                                const Vocab& vocab,
                                std::size_t batchSize,
                                std::size_t maxInLen,
                                std::size_t maxOutLen,
                                Rng& rng,
                                const TokenizerConfig& tokConfig) {
    if (batchSize < 1) {
        throw ConfigError("batchSize must be at least 1");
    }

    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);

    std::vector<Batch> batches;
    for (std::size_t start = 0; start < order.size(); start += batchSize) {
        const std::size_t end = std::min(order.size(), start + batchSize);
        Batch batch;
        batch.kind = kind;
        std::size_t maxIn = 0;
        std::size_t maxOut = 0;
        for (std::size_t i = start; i < end; ++i) {
            const auto& [input, target] = examples[order[i]];
            auto inputIds = encode(input, vocab, maxInLen, tokConfig);
            auto targetIds = encode(target, vocab, maxOutLen, tokConfig);
            maxIn = std::max(maxIn, inputIds.size());
            maxOut = std::max(maxOut, targetIds.size());
            batch.inputLengths.push_back(inputIds.size());
            batch.targetLengths.push_back(targetIds.size());
            batch.inputIds.push_back(std::move(inputIds));
            batch.targetIds.push_back(std::move(targetIds));
        }
        for (auto& row : batch.inputIds) row.resize(maxIn, Vocab::kPad);
        for (auto& row : batch.targetIds) row.resize(maxOut, Vocab::kPad);
        batches.push_back(std::move(batch));
    }
    return batches;
}

} // namespace polarmin
