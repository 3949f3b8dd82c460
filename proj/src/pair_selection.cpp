#include "polarmin/pair_selection.hpp"

#include "polarmin/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace polarmin {

using nlohmann::json;

std::string variantName(SelectionVariant v) {
    switch (v) {
    case SelectionVariant::LrValence: return "LR-Valence";
    case SelectionVariant::LrArousal: return "LR-Arousal";
    case SelectionVariant::LrInfo: return "LR-Info";
    case SelectionVariant::LrcFlipAros: return "LRC-flip-Aros";
    case SelectionVariant::LrcInfo: return "LRC-Info";
    }
    return "?";
}

std::string variantFlag(SelectionVariant v) {
    switch (v) {
    case SelectionVariant::LrValence: return "lr-valence";
    case SelectionVariant::LrArousal: return "lr-arousal";
    case SelectionVariant::LrInfo: return "lr-info";
    case SelectionVariant::LrcFlipAros: return "lrc-flip-aros";
    case SelectionVariant::LrcInfo: return "lrc-info";
    }
    return "?";
}

SelectionVariant parseVariantFlag(std::string_view flag) {
    for (auto v : {SelectionVariant::LrValence, SelectionVariant::LrArousal,
                   SelectionVariant::LrInfo, SelectionVariant::LrcFlipAros,
                   SelectionVariant::LrcInfo}) {
        if (flag == variantFlag(v) || flag == variantName(v)) return v;
    }
    throw ConfigError("unknown selection variant: " + std::string(flag));
}

std::size_t uniqueNum(std::string_view a, std::string_view b, const TokenizerConfig& tokConfig) {
    const auto tokensA = tokenize(a, tokConfig);
    const auto tokensB = tokenize(b, tokConfig);
    std::unordered_set<std::string> setA(tokensA.begin(), tokensA.end());
    std::unordered_set<std::string> setB(tokensB.begin(), tokensB.end());
    std::size_t diff = 0;
    for (const auto& t : setA) {
        if (!setB.count(t)) ++diff;
    }
    for (const auto& t : setB) {
        if (!setA.count(t)) ++diff;
    }
    return diff;
}

namespace {

double meanScore(std::string_view text,
                 const VadLexicon& lexicon,
                 LexicalDimension dimension,
                 const TokenizerConfig& tokConfig) {
    double sum = 0.0;
    std::size_t covered = 0;
    for (const auto& tok : tokenize(text, tokConfig)) {
        if (auto entry = lexicon.lookup(tok)) {
            sum += dimension == LexicalDimension::Valence ? entry->valence : entry->arousal;
            ++covered;
        }
    }
    return covered == 0 ? 0.0 : sum / static_cast<double>(covered);
}

struct Combination {
    Ideology first;
    Ideology second;
};

// Tie-break order between equal-distance combinations.
constexpr Combination kLrcCombos[] = {
    {Ideology::Left, Ideology::Right},
    {Ideology::Left, Ideology::Center},
    {Ideology::Right, Ideology::Center},
};

struct ScoredRecord {
    std::size_t index = 0;
    double distance = 0.0;
    Combination combo{Ideology::Left, Ideology::Right};
};

} // namespace

double lexicalDistance(std::string_view a,
                       std::string_view b,
                       const VadLexicon& lexicon,
                       LexicalDimension dimension,
                       const TokenizerConfig& tokConfig) {
    return std::fabs(meanScore(a, lexicon, dimension, tokConfig) -
                     meanScore(b, lexicon, dimension, tokConfig));
}

std::vector<PolarPair> selectPairs(const std::vector<PolarizedSet>& dataset,
                                   const SelectionConfig& config,
                                   const VadLexicon& lexicon,
                                   const TokenizerConfig& tokConfig) {
    if (dataset.empty()) {
        throw ConfigError("selectPairs needs a non-empty dataset");
    }
    if (!(config.fraction > 0.0 && config.fraction <= 1.0)) {
        throw ConfigError("selection fraction must lie in (0, 1]");
    }

    const bool lrcVariant = config.variant == SelectionVariant::LrcFlipAros ||
                            config.variant == SelectionVariant::LrcInfo;

    auto requireText = [&](const PolarizedSet& rec, Ideology ideology) -> const std::string& {
        const Article& article = articleFor(rec, ideology);
        if (article.text.empty()) {
            throw DataError("record " + rec.recordId + " is missing the " +
                            std::string(1, ideologyTag(ideology)) + " article");
        }
        return article.text;
    };

    auto distanceOf = [&](const PolarizedSet& rec, Combination combo) {
        const std::string& a = requireText(rec, combo.first);
        const std::string& b = requireText(rec, combo.second);
        switch (config.variant) {
        case SelectionVariant::LrValence:
            return lexicalDistance(a, b, lexicon, LexicalDimension::Valence, tokConfig);
        case SelectionVariant::LrArousal:
        case SelectionVariant::LrcFlipAros:
            return lexicalDistance(a, b, lexicon, LexicalDimension::Arousal, tokConfig);
        case SelectionVariant::LrInfo:
        case SelectionVariant::LrcInfo:
            return static_cast<double>(uniqueNum(a, b, tokConfig));
        }
        return 0.0;
    };

    std::vector<ScoredRecord> scored;
    scored.reserve(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto& rec = dataset[i];
        ScoredRecord s;
        s.index = i;
        if (lrcVariant) {
            bool first = true;
            for (const auto& combo : kLrcCombos) {
                const double d = distanceOf(rec, combo);
                if (first || d > s.distance) {
                    s.distance = d;
                    s.combo = combo;
                    first = false;
                }
            }
        } else {
            s.combo = {Ideology::Left, Ideology::Right};
            s.distance = distanceOf(rec, s.combo);
        }
        scored.push_back(s);
    }

    std::stable_sort(scored.begin(), scored.end(), [&](const ScoredRecord& a, const ScoredRecord& b) {
        if (a.distance != b.distance) return a.distance > b.distance;
        return dataset[a.index].recordId < dataset[b.index].recordId;
    });

    const auto keep = static_cast<std::size_t>(
        std::ceil(config.fraction * static_cast<double>(dataset.size())));

    std::vector<PolarPair> pairs;
    for (std::size_t r = 0; r < keep && r < scored.size(); ++r) {
        const auto& s = scored[r];
        const auto& rec = dataset[s.index];
        // Both directions of the chosen combination, except that the center
        // article may only ever be a source.
        const Combination directions[2] = {{s.combo.first, s.combo.second},
                                           {s.combo.second, s.combo.first}};
        for (const auto& dir : directions) {
            if (dir.second == Ideology::Center) continue;
            PolarPair p;
            p.recordId = rec.recordId;
            p.source = dir.first;
            p.target = dir.second;
            p.distance = s.distance;
            p.variant = config.variant;
            pairs.push_back(std::move(p));
        }
    }
    return pairs;
}

std::string pairsToJsonl(const std::vector<PolarPair>& pairs) {
    std::ostringstream out;
    for (const auto& p : pairs) {
        json j;
        j["record_id"] = p.recordId;
        j["source_ideology"] = std::string(1, ideologyTag(p.source));
        j["target_ideology"] = std::string(1, ideologyTag(p.target));
        j["variant"] = variantName(p.variant);
        j["distance"] = p.distance;
        out << j.dump() << '\n';
    }
    return out.str();
}

void savePairManifest(const std::string& path, const std::vector<PolarPair>& pairs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot open pair manifest for writing: " + path);
    }
    out << pairsToJsonl(pairs);
    if (!out) {
        throw DataError("I/O failure while writing pair manifest: " + path);
    }
}

std::vector<PolarPair> loadPairManifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open pair manifest: " + path);
    }
    std::vector<PolarPair> pairs;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            std::ostringstream os;
            os << "line " << lineNo << ": invalid JSON: " << e.what();
            throw DataError(os.str());
        }
        try {
            PolarPair p;
            p.recordId = j.at("record_id").get<std::string>();
            p.source = parseIdeologyTag(j.at("source_ideology").get<std::string>().at(0));
            p.target = parseIdeologyTag(j.at("target_ideology").get<std::string>().at(0));
            p.variant = parseVariantFlag(j.at("variant").get<std::string>());
            p.distance = j.at("distance").get<double>();
            pairs.push_back(std::move(p));
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "line " << lineNo << ": bad pair record: " << e.what();
            throw DataError(os.str());
        }
    }
    return pairs;
}

} // namespace polarmin
