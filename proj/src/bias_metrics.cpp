#include "polarmin/bias_metrics.hpp"

#include "polarmin/errors.hpp"

namespace polarmin {

void BiasThresholds::validate() const {
    if (!(posValenceMin > 0.5 && posValenceMin <= 1.0)) {
        throw ConfigError("posValenceMin must lie in (0.5, 1]");
    }
    if (!(negValenceMax >= 0.0 && negValenceMax < 0.5)) {
        throw ConfigError("negValenceMax must lie in [0, 0.5)");
    }
    if (!(arousalMin >= 0.0 && arousalMin <= 1.0)) {
        throw ConfigError("arousalMin must lie in [0, 1]");
    }
    if (!(negValenceMax < posValenceMin)) {
        throw ConfigError("negValenceMax must be below posValenceMin");
    }
}

nlohmann::json ArousalReport::toJson() const {
    return nlohmann::json{
        {"arousal_pos", arousalPos},
        {"arousal_neg", arousalNeg},
        {"arousal_sum", arousalSum},
        {"counted_pos_tokens", countedPosTokens},
        {"counted_neg_tokens", countedNegTokens},
        {"total_tokens", totalTokens},
    };
}

ArousalReport ArousalReport::fromJson(const nlohmann::json& j) {
    ArousalReport r;
    r.arousalPos = j.at("arousal_pos").get<double>();
    r.arousalNeg = j.at("arousal_neg").get<double>();
    r.arousalSum = j.at("arousal_sum").get<double>();
    r.countedPosTokens = j.at("counted_pos_tokens").get<double>();
    r.countedNegTokens = j.at("counted_neg_tokens").get<double>();
    r.totalTokens = j.at("total_tokens").get<double>();
    return r;
}

ArousalReport arousalScores(std::string_view text,
                            const VadLexicon& lexicon,
                            const BiasThresholds& thresholds,
                            const TokenizerConfig& tokConfig,
                            bool perTokenNormalize) {
    thresholds.validate();
    ArousalReport report;
    for (const auto& token : tokenize(text, tokConfig)) {
        report.totalTokens += 1.0;
        const auto entry = lexicon.lookup(token);
        if (!entry) continue;
        if (entry->arousal < thresholds.arousalMin) continue;
        if (entry->valence >= thresholds.posValenceMin) {
            report.arousalPos += entry->arousal;
            report.countedPosTokens += 1.0;
        } else if (entry->valence <= thresholds.negValenceMax) {
            report.arousalNeg += entry->arousal;
            report.countedNegTokens += 1.0;
        }
    }
    report.arousalSum = report.arousalPos + report.arousalNeg;
    if (perTokenNormalize && report.totalTokens > 0.0) {
        report.arousalPos /= report.totalTokens;
        report.arousalNeg /= report.totalTokens;
        report.arousalSum /= report.totalTokens;
    }
    return report;
}

ArousalReport corpusArousal(const std::vector<ArousalReport>& reports) {
    if (reports.empty()) {
        throw ConfigError("corpusArousal needs at least one report");
    }
    ArousalReport mean;
    for (const auto& r : reports) {
        mean.arousalPos += r.arousalPos;
        mean.arousalNeg += r.arousalNeg;
        mean.arousalSum += r.arousalSum;
        mean.countedPosTokens += r.countedPosTokens;
        mean.countedNegTokens += r.countedNegTokens;
        mean.totalTokens += r.totalTokens;
    }
    const double n = static_cast<double>(reports.size());
    mean.arousalPos /= n;
    mean.arousalNeg /= n;
    mean.countedPosTokens /= n;
    mean.countedNegTokens /= n;
    mean.totalTokens /= n;
    // Recomputed from the averaged buckets so sum == pos + neg stays exact.
    mean.arousalSum = mean.arousalPos + mean.arousalNeg;
    return mean;
}

} // namespace polarmin
