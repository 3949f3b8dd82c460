#include "polarmin/evaluation.hpp"

#include "polarmin/errors.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

namespace polarmin {

namespace {

constexpr double kEps = 1e-9;
constexpr int kMaxOrder = 4;

// n-gram multiset as joined-token keys.
std::map<std::string, std::size_t> ngramCounts(const std::vector<std::string>& tokens, int n) {
    std::map<std::string, std::size_t> counts;
    if (tokens.size() < static_cast<std::size_t>(n)) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (int k = 1; k < n; ++k) {
            key += '\x1f';
            key += tokens[i + k];
        }
        ++counts[key];
    }
    return counts;
}

} // namespace

double corpusBleu(const std::vector<std::string>& hypotheses,
                  const std::vector<std::string>& references,
                  const TokenizerConfig& tokConfig) {
    if (hypotheses.size() != references.size()) {
        throw DataError("bleu: hypothesis/reference count mismatch ("
                        + std::to_string(hypotheses.size()) + " vs "
                        + std::to_string(references.size()) + ")");
    }
    if (hypotheses.empty()) throw DataError("bleu: empty corpus");

    double matched[kMaxOrder] = {0, 0, 0, 0};
    double total[kMaxOrder] = {0, 0, 0, 0};
    std::size_t hypLen = 0, refLen = 0;
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        const auto hyp = tokenize(hypotheses[i], tokConfig);
        const auto ref = tokenize(references[i], tokConfig);
        hypLen += hyp.size();
        refLen += ref.size();
        for (int n = 1; n <= kMaxOrder; ++n) {
            const auto hc = ngramCounts(hyp, n);
            const auto rc = ngramCounts(ref, n);
            for (const auto& [gram, count] : hc) {
                total[n - 1] += static_cast<double>(count);
                const auto it = rc.find(gram);
                if (it != rc.end()) {
                    matched[n - 1] += static_cast<double>(std::min(count, it->second));
                }
            }
        }
    }

    double logPrecisionSum = 0.0;
    for (int n = 0; n < kMaxOrder; ++n) {
        const double num = matched[n] > 0 ? matched[n] : kEps;
        const double den = total[n] > 0 ? total[n] : kEps;
        logPrecisionSum += std::log(num / den);
    }
    if (hypLen == 0) return refLen == 0 ? 1.0 : 0.0;
    const double bp = hypLen >= refLen
                          ? 1.0
                          : std::exp(1.0 - static_cast<double>(refLen) / static_cast<double>(hypLen));
    return bp * std::exp(logPrecisionSum / kMaxOrder);
}

double tokenF1(const std::string& hypothesis, const std::string& reference,
               const TokenizerConfig& tokConfig) {
    const auto hyp = tokenize(hypothesis, tokConfig);
    const auto ref = tokenize(reference, tokConfig);
    if (hyp.empty() && ref.empty()) return 1.0;
    if (hyp.empty() || ref.empty()) return 0.0;

    std::map<std::string, std::size_t> refCounts;
    for (const auto& t : ref) ++refCounts[t];
    std::size_t overlap = 0;
    for (const auto& t : hyp) {
        auto it = refCounts.find(t);
        if (it != refCounts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    if (overlap == 0) return 0.0;
    const double p = static_cast<double>(overlap) / static_cast<double>(hyp.size());
    const double r = static_cast<double>(overlap) / static_cast<double>(ref.size());
    return 2.0 * p * r / (p + r);
}

nlohmann::json MetricsReport::toJson() const {
    return {{"system", system},
            {"n_examples", numExamples},
            {"arousal_pos", arousal.arousalPos},
            {"arousal_neg", arousal.arousalNeg},
            {"arousal_sum", arousal.arousalSum},
            {"bleu", bleu},
            {"token_f1", tokenF1},
            {"token_f1_note", "lexical proxy for embedding-based salience scoring"},
            {"embedding_f1", nullptr}}; // reserved for a future embedding metric
}

MetricsReport MetricsReport::fromJson(const nlohmann::json& j) {
    MetricsReport r;
    r.system = j.at("system").get<std::string>();
    r.numExamples = j.at("n_examples").get<std::size_t>();
    r.arousal.arousalPos = j.at("arousal_pos").get<double>();
    r.arousal.arousalNeg = j.at("arousal_neg").get<double>();
    r.arousal.arousalSum = j.at("arousal_sum").get<double>();
    r.bleu = j.at("bleu").get<double>();
    r.tokenF1 = j.at("token_f1").get<double>();
    return r;
}

MetricsReport evaluateSystem(const std::string& systemName,
                             const std::vector<std::string>& hypotheses,
                             const std::vector<std::string>& references,
                             const VadLexicon& lexicon,
                             const BiasThresholds& thresholds,
                             const TokenizerConfig& tokConfig) {
    if (hypotheses.size() != references.size()) {
        throw DataError("evaluate: hypothesis/reference count mismatch ("
                        + std::to_string(hypotheses.size()) + " vs "
                        + std::to_string(references.size()) + ")");
    }
    if (hypotheses.empty()) throw DataError("evaluate: empty corpus");

    MetricsReport report;
    report.system = systemName;
    report.numExamples = hypotheses.size();

    std::vector<ArousalReport> perText;
    perText.reserve(hypotheses.size());
    double f1Sum = 0.0;
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        perText.push_back(arousalScores(hypotheses[i], lexicon, thresholds, tokConfig));
        f1Sum += tokenF1(hypotheses[i], references[i], tokConfig);
    }
    report.arousal = corpusArousal(perText);
    report.bleu = corpusBleu(hypotheses, references, tokConfig);
    report.tokenF1 = f1Sum / static_cast<double>(hypotheses.size());
    return report;
}

nlohmann::json AbTestResult::toJson() const {
    return {{"wins", wins},
            {"losses", losses},
            {"draws", draws},
            {"n_effective", nEffective},
            {"p_value", pValue},
            {"exact_fraction", exactFraction},
            {"test", "one-sided exact binomial, p0=0.5"}};
}

AbTestResult binomialAbTest(std::size_t wins, std::size_t losses,
                            std::size_t draws, DrawPolicy policy) {
    AbTestResult res;
    res.draws = draws;
    res.wins = wins;
    res.losses = losses;
    if (policy == DrawPolicy::Split) {
        res.wins += draws / 2;
        res.losses += draws - draws / 2;
    }
    res.nEffective = res.wins + res.losses;
    if (res.nEffective == 0) {
        throw DataError("ab test: no decisive judgments after draw handling");
    }

    using boost::multiprecision::cpp_int;
    const std::size_t n = res.nEffective;
    const std::size_t k = res.wins;

    // tail = sum_{i=k}^{n} C(n, i); Pascal row built exactly
    cpp_int tail = 0;
    cpp_int binom = 1; // C(n, 0)
    for (std::size_t i = 0; i <= n; ++i) {
        if (i >= k) tail += binom;
        if (i < n) {
            binom = binom * static_cast<unsigned>(n - i) / static_cast<unsigned>(i + 1);
        }
    }
    const cpp_int denom = cpp_int(1) << n;

    using bigfloat = boost::multiprecision::cpp_bin_float_100;
    res.pValue = static_cast<double>(bigfloat(tail) / bigfloat(denom));
    res.exactFraction = tail.str() + "/" + denom.str();
    return res;
}

namespace {

struct MetricRow {
    const char* key;
    double a;
    double b;
    bool lowerIsBetter;
};

std::vector<MetricRow> metricRows(const MetricsReport& a, const MetricsReport& b) {
    return {{"arousal_pos", a.arousal.arousalPos, b.arousal.arousalPos, true},
            {"arousal_neg", a.arousal.arousalNeg, b.arousal.arousalNeg, true},
            {"arousal_sum", a.arousal.arousalSum, b.arousal.arousalSum, true},
            {"bleu", a.bleu, b.bleu, false},
            {"token_f1", a.tokenF1, b.tokenF1, false}};
}

} // namespace

nlohmann::json compareSystems(const MetricsReport& a, const MetricsReport& b) {
    nlohmann::json out;
    out["system_a"] = a.system;
    out["system_b"] = b.system;
    nlohmann::json metrics = nlohmann::json::object();
    for (const auto& row : metricRows(a, b)) {
        const char* better = "tie";
        if (row.a != row.b) {
            const bool bWins = row.lowerIsBetter ? (row.b < row.a) : (row.b > row.a);
            better = bWins ? "b" : "a";
        }
        metrics[row.key] = {{"a", row.a},
                            {"b", row.b},
                            {"delta", row.b - row.a},
                            {"better", better},
                            {"direction", row.lowerIsBetter ? "lower" : "higher"}};
    }
    out["metrics"] = metrics;
    return out;
}

std::string renderComparisonTable(const MetricsReport& a, const MetricsReport& b) {
    std::ostringstream os;
    os << std::left << std::setw(14) << "metric" << std::right << std::setw(12) << a.system
       << std::setw(12) << b.system << std::setw(12) << "delta" << "  better\n";
    os << std::string(58, '-') << '\n';
    os << std::fixed << std::setprecision(4);
    for (const auto& row : metricRows(a, b)) {
        const char* better = "tie";
        if (row.a != row.b) {
            better = (row.lowerIsBetter ? (row.b < row.a) : (row.b > row.a)) ? b.system.c_str()
                                                                             : a.system.c_str();
        }
        os << std::left << std::setw(14) << row.key << std::right << std::setw(12) << row.a
           << std::setw(12) << row.b << std::setw(12) << (row.b - row.a) << "  " << better
           << (row.lowerIsBetter ? " (lower wins)" : " (higher wins)") << '\n';
    }
    return os.str();
}

} // namespace polarmin
