#include "polarmin/vocab.hpp"

#include "polarmin/errors.hpp"

#include <algorithm>
#include <map>

namespace polarmin {

Vocab::Vocab() {
    idToToken_ = {kPadToken, kBosToken, kEosToken, kSepToken,
                  kUnkToken, kTitleToken, kArticleToken};
    for (int i = 0; i < static_cast<int>(idToToken_.size()); ++i) {
        tokenToId_[idToToken_[static_cast<std::size_t>(i)]] = i;
    }
}

Vocab Vocab::build(const std::vector<PolarizedSet>& dataset,
                   std::size_t minCount,
                   std::size_t maxSize,
                   const TokenizerConfig& tokConfig) {
    // std::map keeps token order stable, which pins the tie-break between
    // equal-count tokens.
    std::map<std::string, std::size_t> counts;
    auto countText = [&](const std::string& text) {
        for (auto& tok : tokenize(text, tokConfig)) {
            counts[std::move(tok)]++;
        }
    };
    for (const auto& rec : dataset) {
        for (const Article* a : {&rec.left, &rec.right, &rec.center, &rec.target}) {
            countText(a->title);
            countText(a->text);
        }
    }

    std::vector<std::pair<std::string, std::size_t>> ranked;
    ranked.reserve(counts.size());
    for (auto& [tok, count] : counts) {
        if (count >= minCount) ranked.emplace_back(tok, count);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocab vocab;
    for (const auto& [tok, count] : ranked) {
        (void)count;
        if (vocab.idToToken_.size() - kNumSpecials >= maxSize) break;
        if (vocab.tokenToId_.count(tok)) continue; // marker already special
        vocab.tokenToId_[tok] = static_cast<int>(vocab.idToToken_.size());
        vocab.idToToken_.push_back(tok);
    }
    return vocab;
}

Vocab Vocab::fromTokenList(const std::vector<std::string>& nonSpecialTokens) {
    Vocab vocab;
    for (const auto& tok : nonSpecialTokens) {
        if (vocab.tokenToId_.count(tok)) {
            throw ConfigError("duplicate or special token in vocab list: " + tok);
        }
        vocab.tokenToId_[tok] = static_cast<int>(vocab.idToToken_.size());
        vocab.idToToken_.push_back(tok);
    }
    return vocab;
}

int Vocab::idOf(std::string_view token) const {
    const auto it = tokenToId_.find(std::string(token));
    return it == tokenToId_.end() ? kUnk : it->second;
}

const std::string& Vocab::tokenOf(int id) const {
    if (id < 0 || id >= static_cast<int>(idToToken_.size())) {
        throw ConfigError("token id out of range: " + std::to_string(id));
    }
    return idToToken_[static_cast<std::size_t>(id)];
}

bool Vocab::contains(std::string_view token) const {
    return tokenToId_.count(std::string(token)) > 0;
}

nlohmann::json Vocab::toJson() const {
    std::vector<std::string> tail(idToToken_.begin() + kNumSpecials, idToToken_.end());
    return nlohmann::json{{"tokens", tail}};
}

Vocab Vocab::fromJson(const nlohmann::json& j) {
    return fromTokenList(j.at("tokens").get<std::vector<std::string>>());
}

std::vector<int> encode(std::string_view text,
                        const Vocab& vocab,
                        std::size_t maxLen,
                        const TokenizerConfig& tokConfig) {
    if (maxLen < 2) {
        throw ConfigError("encode maxLen must be at least 2");
    }
    std::vector<int> ids;
    ids.push_back(Vocab::kBos);
    const auto tokens = tokenize(text, tokConfig);
    const std::size_t limit = maxLen - 2;
    for (std::size_t i = 0; i < tokens.size() && i < limit; ++i) {
        ids.push_back(vocab.idOf(tokens[i]));
    }
    ids.push_back(Vocab::kEos);
    return ids;
}

std::string decodeIds(std::span<const int> ids, const Vocab& vocab) {
    std::string out;
    for (int id : ids) {
        if (id == Vocab::kPad || id == Vocab::kBos || id == Vocab::kEos) continue;
        if (!out.empty()) out.push_back(' ');
        out += vocab.tokenOf(id);
    }
    return out;
}

} // namespace polarmin
