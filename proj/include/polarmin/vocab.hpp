#pragma once

#include "polarmin/dataset.hpp"
#include "polarmin/lexicon.hpp"

#include "json.hpp"

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace polarmin {

// Token/id bijection with fixed low ids for the special tokens.
class Vocab {
public:
    static constexpr int kPad = 0;
    static constexpr int kBos = 1;
    static constexpr int kEos = 2;
    static constexpr int kSep = 3;
    static constexpr int kUnk = 4;
    static constexpr int kTitle = 5;
    static constexpr int kArticle = 6;
    static constexpr int kNumSpecials = 7;

    static constexpr const char* kPadToken = "<pad>";
    static constexpr const char* kBosToken = "<bos>";
    static constexpr const char* kEosToken = "<eos>";
    static constexpr const char* kSepToken = "<sep>";
    static constexpr const char* kUnkToken = "<unk>";
    static constexpr const char* kTitleToken = "<title>";
    static constexpr const char* kArticleToken = "<article>";

    // Counts tokens over every article and target (titles included), keeps
    // those with frequency >= minCount ordered by (count desc, token asc)
    // up to maxSize non-special entries.
    static Vocab build(const std::vector<PolarizedSet>& dataset,
                       std::size_t minCount = 1,
                       std::size_t maxSize = 50000,
                       const TokenizerConfig& tokConfig = {});

    static Vocab fromTokenList(const std::vector<std::string>& nonSpecialTokens);

    int idOf(std::string_view token) const; // kUnk for out-of-vocabulary
    const std::string& tokenOf(int id) const;
    bool contains(std::string_view token) const;
    std::size_t size() const { return idToToken_.size(); }

    nlohmann::json toJson() const;
    static Vocab fromJson(const nlohmann::json& j);

private:
    Vocab();

    std::unordered_map<std::string, int> tokenToId_;
    std::vector<std::string> idToToken_;
};

// BOS + token ids (UNK for unknown tokens) + EOS, truncated so the result is
// at most maxLen long and always ends with EOS. maxLen must be >= 2.
std::vector<int> encode(std::string_view text,
                        const Vocab& vocab,
                        std::size_t maxLen,
                        const TokenizerConfig& tokConfig = {});

// Joins tokens with single spaces, dropping PAD/BOS/EOS.
std::string decodeIds(std::span<const int> ids, const Vocab& vocab);

} // namespace polarmin
