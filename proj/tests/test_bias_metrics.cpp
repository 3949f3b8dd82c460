#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "polarmin/bias_metrics.hpp"
#include "polarmin/errors.hpp"
#include "polarmin/rng.hpp"

#include <string>
#include <vector>

using namespace polarmin;

namespace {

// Three-word lexicon with round numbers so the oracles are exact by hand.
VadLexicon handLexicon() {
    VadLexicon lex;
    lex.insert("fury", VadEntry{0.1, 0.9, 0.3});    // negative, high arousal
    lex.insert("triumph", VadEntry{0.9, 0.8, 0.7}); // positive, high arousal
    lex.insert("report", VadEntry{0.5, 0.2, 0.5});  // neutral
    return lex;
}

const std::string kDemoLexicon = std::string(POLARMIN_SOURCE_DIR) + "/data/demo_vad.tsv";

} // namespace

TEST_CASE("arousal buckets sum covered tokens by polarity") {
    const VadLexicon lex = handLexicon();
    const ArousalReport r = arousalScores("fury report triumph fury unknown", lex);
    CHECK(r.arousalNeg == doctest::Approx(1.8).epsilon(1e-12));  // two furies
    CHECK(r.arousalPos == doctest::Approx(0.8).epsilon(1e-12));  // one triumph
    CHECK(r.arousalSum == doctest::Approx(2.6).epsilon(1e-12));
    CHECK(r.countedNegTokens == 2.0);
    CHECK(r.countedPosTokens == 1.0);
    CHECK(r.totalTokens == 5.0); // "unknown" counts toward length only
}

TEST_CASE("neutral words fall outside both valence buckets") {
    const VadLexicon lex = handLexicon();
    const ArousalReport r = arousalScores("report report report", lex);
    CHECK(r.arousalPos == 0.0);
    CHECK(r.arousalNeg == 0.0);
    CHECK(r.arousalSum == 0.0);
    CHECK(r.totalTokens == 3.0);
}

TEST_CASE("empty text scores zero everywhere") {
    const VadLexicon lex = handLexicon();
    const ArousalReport r = arousalScores("", lex);
    CHECK(r.arousalSum == 0.0);
    CHECK(r.totalTokens == 0.0);
}

TEST_CASE("arousal floor drops low-arousal polar words") {
    VadLexicon lex;
    lex.insert("gloomy", VadEntry{0.2, 0.3, 0.4}); // negative but quiet
    lex.insert("fury", VadEntry{0.1, 0.9, 0.3});
    BiasThresholds th;
    th.arousalMin = 0.5;
    const ArousalReport r = arousalScores("gloomy fury", lex, th);
    CHECK(r.arousalNeg == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(r.countedNegTokens == 1.0);
}

TEST_CASE("custom valence cutoffs move the bucket boundaries") {
    VadLexicon lex = handLexicon();
    lex.insert("upbeat", VadEntry{0.6, 0.4, 0.5}); // mildly positive
    CHECK(arousalScores("upbeat", lex).arousalPos == 0.0); // default cutoff 0.65
    BiasThresholds th;
    th.posValenceMin = 0.55; // cutoffs stay on their side of the midpoint
    CHECK(arousalScores("upbeat", lex, th).arousalPos ==
          doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("threshold validation rejects nonsense") {
    BiasThresholds bad;
    bad.posValenceMin = 0.3;
    bad.negValenceMax = 0.7; // overlapping buckets
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    BiasThresholds outOfRange;
    outOfRange.arousalMin = 1.5;
    CHECK_THROWS_AS(outOfRange.validate(), ConfigError);
    CHECK_NOTHROW(BiasThresholds{}.validate());
}

TEST_CASE("per-token normalization divides by the token count") {
    const VadLexicon lex = handLexicon();
    const ArousalReport raw = arousalScores("fury triumph report unknown", lex);
    const ArousalReport norm = arousalScores("fury triumph report unknown", lex, {}, {}, true);
    CHECK(norm.arousalSum == doctest::Approx(raw.arousalSum / 4.0).epsilon(1e-12));
    CHECK(norm.arousalPos == doctest::Approx(raw.arousalPos / 4.0).epsilon(1e-12));
    CHECK(norm.arousalNeg == doctest::Approx(raw.arousalNeg / 4.0).epsilon(1e-12));
}

TEST_CASE("concatenation adds arousal sums exactly") {
    // Left-to-right accumulation makes score(a + " " + b) bitwise equal to
    // continuing the sum, not merely close.
    const VadLexicon lex = loadVadLexicon(kDemoLexicon);
    std::vector<std::string> words;
    for (const auto& [w, e] : lex.entries()) words.push_back(w);
    std::sort(words.begin(), words.end());

    Rng rng(515, "concat-prop");
    for (int trial = 0; trial < 50; ++trial) {
        std::string a, b;
        const std::size_t lenA = 1 + rng.uniformInt(12);
        const std::size_t lenB = 1 + rng.uniformInt(12);
        for (std::size_t i = 0; i < lenA; ++i) {
            if (!a.empty()) a += ' ';
            a += words[rng.uniformInt(words.size())];
        }
        for (std::size_t i = 0; i < lenB; ++i) {
            if (!b.empty()) b += ' ';
            b += words[rng.uniformInt(words.size())];
        }
        const ArousalReport ra = arousalScores(a, lex);
        const ArousalReport rb = arousalScores(b, lex);
        const ArousalReport rab = arousalScores(a + " " + b, lex);
        CAPTURE(a);
        CAPTURE(b);
        // Independent oracle accumulating in token order: bitwise equal,
        // because the library walks the same tokens in the same order.
        BiasThresholds th;
        double pos = 0.0, neg = 0.0;
        for (const auto& tok : tokenize(a + " " + b)) {
            const auto e = lex.lookup(tok);
            if (!e) continue;
            if (e->valence >= th.posValenceMin) pos += e->arousal;
            else if (e->valence <= th.negValenceMax) neg += e->arousal;
        }
        CHECK(rab.arousalPos == pos);
        CHECK(rab.arousalNeg == neg);
        // Summing the two sub-scores reassociates the additions, so that
        // comparison is close rather than bitwise.
        CHECK(rab.arousalPos ==
              doctest::Approx(ra.arousalPos + rb.arousalPos).epsilon(1e-12));
        CHECK(rab.arousalNeg ==
              doctest::Approx(ra.arousalNeg + rb.arousalNeg).epsilon(1e-12));
        CHECK(rab.totalTokens == ra.totalTokens + rb.totalTokens); // integral, exact
    }
}

TEST_CASE("corpus mean preserves the pos+neg=sum identity") {
    const VadLexicon lex = handLexicon();
    std::vector<ArousalReport> reports;
    reports.push_back(arousalScores("fury fury", lex));
    reports.push_back(arousalScores("triumph", lex));
    reports.push_back(arousalScores("report", lex));
    const ArousalReport mean = corpusArousal(reports);
    CHECK(mean.arousalNeg == doctest::Approx(1.8 / 3.0).epsilon(1e-12));
    CHECK(mean.arousalPos == doctest::Approx(0.8 / 3.0).epsilon(1e-12));
    // The identity is maintained exactly, not within rounding.
    CHECK(mean.arousalSum == mean.arousalPos + mean.arousalNeg);
}

TEST_CASE("corpus mean of an empty list is rejected") {
    CHECK_THROWS_AS(corpusArousal({}), ConfigError);
}

TEST_CASE("arousal report json round trip") {
    const VadLexicon lex = handLexicon();
    const ArousalReport r = arousalScores("fury triumph report", lex);
    const ArousalReport back = ArousalReport::fromJson(r.toJson());
    CHECK(back.arousalPos == r.arousalPos);
    CHECK(back.arousalNeg == r.arousalNeg);
    CHECK(back.arousalSum == r.arousalSum);
    CHECK(back.countedPosTokens == r.countedPosTokens);
    CHECK(back.countedNegTokens == r.countedNegTokens);
    CHECK(back.totalTokens == r.totalTokens);
}

TEST_CASE("demo lexicon polar words land in the default buckets") {
    const VadLexicon lex = loadVadLexicon(kDemoLexicon);
    const ArousalReport neg = arousalScores("outrage scandal fury", lex);
    CHECK(neg.countedNegTokens == 3.0);
    CHECK(neg.countedPosTokens == 0.0);
    CHECK(neg.arousalNeg > 1.5); // all three are high-arousal by design

    const ArousalReport pos = arousalScores("triumph thrilling spectacular", lex);
    CHECK(pos.countedPosTokens == 3.0);
    CHECK(pos.countedNegTokens == 0.0);

    const ArousalReport neutral = arousalScores("report council meeting budget", lex);
    CHECK(neutral.arousalSum == 0.0);
}
