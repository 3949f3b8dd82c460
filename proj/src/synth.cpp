#include "polarmin/synth.hpp"

#include "polarmin/errors.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace polarmin {

namespace {

// Deterministic stratum listing: map iteration order is not stable across
// library versions, so sort before sampling.
std::vector<std::string> stratumWords(const VadLexicon& lexicon,
                                      bool (*member)(const VadEntry&, const SynthConfig&),
                                      const SynthConfig& config) {
    std::vector<std::string> words;
    for (const auto& [word, entry] : lexicon.entries()) {
        if (member(entry, config)) {
            words.push_back(word);
        }
    }
    std::sort(words.begin(), words.end());
    return words;
}

bool isNeutral(const VadEntry& e, const SynthConfig& c) {
    return e.valence > c.negValenceMax && e.valence < c.posValenceMin;
}

bool isNegBiased(const VadEntry& e, const SynthConfig& c) {
    return e.valence <= c.negValenceMax && e.arousal >= c.minBiasArousal;
}

bool isPosBiased(const VadEntry& e, const SynthConfig& c) {
    return e.valence >= c.posValenceMin && e.arousal >= c.minBiasArousal;
}

std::vector<std::string> sampleWords(const std::vector<std::string>& pool,
                                     std::size_t count, Rng& rng) {
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(pool[rng.uniformInt(pool.size())]);
    }
    return out;
}

std::string joinWords(const std::vector<std::string>& a, const std::vector<std::string>& b = {}) {
    std::string s;
    for (const auto& w : a) {
        if (!s.empty()) s += ' ';
        s += w;
    }
    for (const auto& w : b) {
        if (!s.empty()) s += ' ';
        s += w;
    }
    return s;
}

std::string makeTitle(const std::vector<std::string>& core,
                      const std::vector<std::string>& span) {
    std::vector<std::string> words(core.begin(),
                                   core.begin() + static_cast<long>(std::min<std::size_t>(2, core.size())));
    if (!span.empty()) {
        words.push_back(span.front());
    }
    return joinWords(words);
}

std::string paddedId(const std::string& prefix, std::size_t index) {
    std::ostringstream os;
    os << prefix << '-';
    std::string digits = std::to_string(index);
    for (std::size_t i = digits.size(); i < 6; ++i) os << '0';
    os << digits;
    return os.str();
}

} // namespace

void SynthConfig::validate() const {
    if (numRecords == 0) {
        throw ConfigError("synth: numRecords must be positive");
    }
    if (coreMinLen == 0 || coreMinLen > coreMaxLen) {
        throw ConfigError("synth: need 1 <= coreMinLen <= coreMaxLen");
    }
    if (spanMinLen == 0 || spanMinLen > spanMaxLen) {
        throw ConfigError("synth: need 1 <= spanMinLen <= spanMaxLen");
    }
    if (centerSpanMaxLen == 0) {
        throw ConfigError("synth: centerSpanMaxLen must be positive");
    }
    if (!(negValenceMax < posValenceMin)) {
        throw ConfigError("synth: negValenceMax must be below posValenceMin");
    }
    if (titleBiasProb < 0.0 || titleBiasProb > 1.0) {
        throw ConfigError("synth: titleBiasProb must lie in [0, 1]");
    }
}

std::vector<PolarizedSet> generateSyntheticCorpus(const SynthConfig& config,
                                                  const VadLexicon& lexicon,
                                                  Rng& rng) {
    config.validate();

    const auto neutral = stratumWords(lexicon, isNeutral, config);
    const auto negPool = stratumWords(lexicon, isNegBiased, config);
    const auto posPool = stratumWords(lexicon, isPosBiased, config);

    std::vector<std::string> missing;
    if (neutral.empty()) missing.push_back("neutral (mid valence)");
    if (negPool.empty()) missing.push_back("negative high-arousal");
    if (posPool.empty()) missing.push_back("positive high-arousal");
    if (!missing.empty()) {
        std::string what = "synthetic corpus: empty lexicon strata:";
        for (const auto& m : missing) what += " [" + m + "]";
        throw DataError(what);
    }

    std::vector<PolarizedSet> records;
    records.reserve(config.numRecords);
    for (std::size_t i = 0; i < config.numRecords; ++i) {
        const std::size_t coreLen =
            config.coreMinLen + rng.uniformInt(config.coreMaxLen - config.coreMinLen + 1);
        const auto core = sampleWords(neutral, coreLen, rng);

        const std::size_t spanLenA =
            config.spanMinLen + rng.uniformInt(config.spanMaxLen - config.spanMinLen + 1);
        const std::size_t spanLenB =
            config.spanMinLen + rng.uniformInt(config.spanMaxLen - config.spanMinLen + 1);
        // Which outlet carries which polarity alternates with record parity so
        // neither side is systematically the negative one.
        const auto& leftPool = (i % 2 == 0) ? negPool : posPool;
        const auto& rightPool = (i % 2 == 0) ? posPool : negPool;
        const auto leftSpan = sampleWords(leftPool, spanLenA, rng);
        const auto rightSpan = sampleWords(rightPool, spanLenB, rng);

        const std::size_t centerLen = 1 + rng.uniformInt(config.centerSpanMaxLen);
        const auto& centerPool = (rng.uniformInt(2) == 0) ? negPool : posPool;
        const auto centerSpan = sampleWords(centerPool, centerLen, rng);

        PolarizedSet rec;
        rec.recordId = paddedId(config.idPrefix, i);
        rec.issue = config.idPrefix + " issue " + std::to_string(i);
        rec.left.text = joinWords(core, leftSpan);
        rec.right.text = joinWords(core, rightSpan);
        rec.center.text = joinWords(core, centerSpan);
        rec.target.text = joinWords(core);
        if (config.emitTitles) {
            rec.left.title = makeTitle(core, leftSpan);
            rec.right.title = makeTitle(core, rightSpan);
            rec.center.title = makeTitle(core, centerSpan);
            // Reference titles either echo the negative-leaning span's lead
            // word or fall back to the next core word: headlines sometimes
            // keep framing that a balanced body drops, and nothing in the
            // sources says which kind of headline a record got.
            const auto& negSpan = (i % 2 == 0) ? leftSpan : rightSpan;
            const bool loaded = rng.nextDouble() < config.titleBiasProb;
            const std::string echo =
                loaded ? negSpan.front() : core[std::min<std::size_t>(2, core.size() - 1)];
            rec.target.title = makeTitle(core, {echo});
        }
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace polarmin
