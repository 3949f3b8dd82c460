#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "polarmin/errors.hpp"
#include "polarmin/evaluation.hpp"
#include "polarmin/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

using namespace polarmin;

namespace {

// Reference BLEU built on token-vector maps — shares no representation with
// the library's joined-string n-gram counters.
double bleuOracle(const std::vector<std::string>& hyps,
                  const std::vector<std::string>& refs) {
    const double eps = 1e-9;
    double logSum = 0.0;
    for (int n = 1; n <= 4; ++n) {
        std::size_t num = 0;
        std::size_t den = 0;
        for (std::size_t i = 0; i < hyps.size(); ++i) {
            const auto h = tokenize(hyps[i]);
            const auto r = tokenize(refs[i]);
            std::map<std::vector<std::string>, int> hc, rc;
            for (std::size_t j = 0; j + n <= h.size(); ++j)
                ++hc[std::vector<std::string>(h.begin() + j, h.begin() + j + n)];
            for (std::size_t j = 0; j + n <= r.size(); ++j)
                ++rc[std::vector<std::string>(r.begin() + j, r.begin() + j + n)];
            for (const auto& [g, c] : hc) {
                const auto it = rc.find(g);
                num += std::min(c, it == rc.end() ? 0 : it->second);
            }
            if (h.size() >= static_cast<std::size_t>(n)) den += h.size() - n + 1;
        }
        const double p = (num > 0 ? static_cast<double>(num) : eps) /
                         (den > 0 ? static_cast<double>(den) : eps);
        logSum += std::log(p);
    }
    std::size_t c = 0, r = 0;
    for (const auto& h : hyps) c += tokenize(h).size();
    for (const auto& t : refs) r += tokenize(t).size();
    const double bp = c >= r ? 1.0
                             : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
    return bp * std::exp(logSum / 4.0);
}

std::string randomText(Rng& rng, const std::vector<std::string>& pool,
                       std::size_t minLen, std::size_t maxLen) {
    const std::size_t n = minLen + rng.uniformInt(maxLen - minLen + 1);
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        if (!s.empty()) s += ' ';
        s += pool[rng.uniformInt(pool.size())];
    }
    return s;
}

// Pascal-row tail oracle in plain 64-bit arithmetic (safe through n = 25;
// the full row sum there is 2^25).
std::pair<double, std::string> binomialTailOracle(std::size_t n, std::size_t k) {
    std::uint64_t tail = 0;
    std::uint64_t binom = 1;
    for (std::size_t i = 0; i <= n; ++i) {
        if (i >= k) tail += binom;
        if (i < n) binom = binom * (n - i) / (i + 1);
    }
    const std::uint64_t denom = std::uint64_t{1} << n;
    return {static_cast<double>(tail) / static_cast<double>(denom),
            std::to_string(tail) + "/" + std::to_string(denom)};
}

VadLexicon handLexicon() {
    VadLexicon lex;
    lex.insert("fury", VadEntry{0.1, 0.9, 0.3});
    lex.insert("triumph", VadEntry{0.9, 0.8, 0.7});
    lex.insert("report", VadEntry{0.5, 0.2, 0.5});
    return lex;
}

} // namespace

// ---- bleu ---------------------------------------------------------------

TEST_CASE("bleu of a corpus against itself is exactly one") {
    const std::vector<std::string> texts = {
        "the city council approved the budget",
        "short",
        "a b c d e f g h",
    };
    CHECK(corpusBleu(texts, texts) == 1.0);
    CHECK(corpusBleu({"one line"}, {"one line"}) == 1.0);
}

TEST_CASE("bleu matches the hand-evaluated short-pair value") {
    // Precisions 3/3, 2/2, 1/1 and a smoothed 4-gram term; only the brevity
    // penalty is left: exp(1 - 4/3).
    const double got = corpusBleu({"the cat sat"}, {"the cat sat down"});
    CHECK(got == doctest::Approx(std::exp(1.0 - 4.0 / 3.0)).epsilon(1e-12));
    CHECK(got == doctest::Approx(0.7165313105737893).epsilon(1e-12));
}

TEST_CASE("bleu is tiny but positive for disjoint corpora") {
    const double v = corpusBleu({"aa bb cc dd"}, {"xx yy zz ww"});
    CHECK(v > 0.0);
    CHECK(v < 1e-6);
}

TEST_CASE("replacing a hypothesis with its reference can lower corpus bleu") {
    // The per-order precisions provably never decrease under replacement,
    // but the brevity penalty can: here the second pair's overlong "q q"
    // props up the corpus hypothesis length, and swapping it for the
    // one-token reference deepens the corpus-wide penalty.
    const std::vector<std::string> hyps = {"b a", "q q"};
    const std::vector<std::string> refs = {"q b b b a", "q"};
    const double before = corpusBleu(hyps, refs);
    const double after = corpusBleu({"b a", "q"}, refs);
    // before = exp(-1/2) * (3/4 * 1/2)^(1/4); after = exp(-1) * 1.
    CHECK(before ==
          doctest::Approx(std::exp(-0.5) * std::pow(0.375, 0.25)).epsilon(1e-12));
    CHECK(after == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(after < before);
}

TEST_CASE("replacement is monotone while the brevity penalty is idle") {
    const std::vector<std::string> pool = {"aa", "bb", "cc", "dd", "ee"};
    Rng rng(8080, "bleu-mono");
    int assertions = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng.uniformInt(3);
        std::vector<std::string> hyps, refs;
        for (std::size_t i = 0; i < n; ++i) {
            hyps.push_back(randomText(rng, pool, 1, 6));
            refs.push_back(randomText(rng, pool, 1, 6));
        }
        const double before = corpusBleu(hyps, refs);
        for (std::size_t i = 0; i < n; ++i) {
            auto swapped = hyps;
            swapped[i] = refs[i];
            std::size_t c = 0, r = 0;
            for (const auto& h : swapped) c += tokenize(h).size();
            for (const auto& t : refs) r += tokenize(t).size();
            if (c < r) continue; // penalty active: monotonicity not guaranteed
            CHECK(corpusBleu(swapped, refs) >= before - 1e-12);
            ++assertions;
        }
    }
    CHECK(assertions > 100); // the guard must not have filtered everything out
}

TEST_CASE("bleu stays within (0, 1] and matches the independent oracle") {
    const std::vector<std::string> pool = {"aa", "bb", "cc", "dd"};
    Rng rng(6161, "bleu-oracle");
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.uniformInt(4);
        std::vector<std::string> hyps, refs;
        for (std::size_t i = 0; i < n; ++i) {
            hyps.push_back(randomText(rng, pool, 1, 8));
            refs.push_back(randomText(rng, pool, 1, 8));
        }
        const double got = corpusBleu(hyps, refs);
        CHECK(got > 0.0);
        CHECK(got <= 1.0);
        CHECK(got == doctest::Approx(bleuOracle(hyps, refs)).epsilon(1e-12));
    }
}

TEST_CASE("bleu rejects misaligned or empty corpora") {
    CHECK_THROWS_AS(corpusBleu({"a", "b"}, {"a"}), DataError);
    CHECK_THROWS_AS(corpusBleu({}, {}), DataError);
}

// ---- token f1 -----------------------------------------------------------

TEST_CASE("token f1 golden cases") {
    CHECK(tokenF1("a b c", "a b c") == 1.0);
    CHECK(tokenF1("a b", "x y") == 0.0);
    CHECK(tokenF1("a b c d", "a b x y") == doctest::Approx(0.5).epsilon(1e-12));
    // Multiset clipping: precision 1/3, recall 1/1.
    CHECK(tokenF1("a a a", "a") == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(tokenF1("", "") == 1.0);
    CHECK(tokenF1("something", "") == 0.0);
    CHECK(tokenF1("", "something") == 0.0);
}

TEST_CASE("token f1 is symmetric") {
    const std::vector<std::string> pool = {"aa", "bb", "cc"};
    Rng rng(717, "f1-sym");
    for (int trial = 0; trial < 300; ++trial) {
        const std::string a = randomText(rng, pool, 0, 8);
        const std::string b = randomText(rng, pool, 0, 8);
        CAPTURE(a);
        CAPTURE(b);
        // Swapping the arguments swaps precision and recall, and the
        // harmonic mean commutes — so the doubles agree bitwise.
        CHECK(tokenF1(a, b) == tokenF1(b, a));
    }
}

// ---- evaluateSystem -----------------------------------------------------

TEST_CASE("evaluateSystem assembles the component metrics") {
    const VadLexicon lex = handLexicon();
    const std::vector<std::string> hyps = {"fury report", "triumph report done"};
    const std::vector<std::string> refs = {"report fury", "report only"};
    const MetricsReport rep = evaluateSystem("sys-a", hyps, refs, lex);
    CHECK(rep.system == "sys-a");
    CHECK(rep.numExamples == 2);
    CHECK(rep.bleu == doctest::Approx(corpusBleu(hyps, refs)).epsilon(1e-12));
    CHECK(rep.tokenF1 ==
          doctest::Approx((tokenF1(hyps[0], refs[0]) + tokenF1(hyps[1], refs[1])) / 2.0)
              .epsilon(1e-12));
    // Arousal buckets are the corpus means over the hypotheses.
    CHECK(rep.arousal.arousalNeg == doctest::Approx(0.9 / 2.0).epsilon(1e-12));
    CHECK(rep.arousal.arousalPos == doctest::Approx(0.8 / 2.0).epsilon(1e-12));
    CHECK(rep.arousal.arousalSum == rep.arousal.arousalPos + rep.arousal.arousalNeg);
}

TEST_CASE("evaluateSystem validates alignment") {
    const VadLexicon lex = handLexicon();
    CHECK_THROWS_AS(evaluateSystem("x", {"a"}, {"a", "b"}, lex), DataError);
    CHECK_THROWS_AS(evaluateSystem("x", {}, {}, lex), DataError);
}

TEST_CASE("evaluateSystem is permutation-equivariant") {
    const VadLexicon lex = handLexicon();
    std::vector<std::string> hyps = {"fury report", "triumph", "report report", "fury fury"};
    std::vector<std::string> refs = {"report", "triumph triumph", "report", "calm words"};
    const MetricsReport base = evaluateSystem("s", hyps, refs, lex);
    std::vector<std::size_t> order = {2, 0, 3, 1};
    std::vector<std::string> h2, r2;
    for (auto i : order) {
        h2.push_back(hyps[i]);
        r2.push_back(refs[i]);
    }
    const MetricsReport perm = evaluateSystem("s", h2, r2, lex);
    CHECK(perm.bleu == doctest::Approx(base.bleu).epsilon(1e-12));
    CHECK(perm.tokenF1 == doctest::Approx(base.tokenF1).epsilon(1e-12));
    CHECK(perm.arousal.arousalSum ==
          doctest::Approx(base.arousal.arousalSum).epsilon(1e-12));
}

TEST_CASE("metrics report json round trip and proxy labeling") {
    const VadLexicon lex = handLexicon();
    const MetricsReport rep =
        evaluateSystem("sys", {"fury report"}, {"report"}, lex);
    const nlohmann::json j = rep.toJson();
    CHECK(j.at("token_f1_note").get<std::string>().find("proxy") != std::string::npos);
    CHECK(j.at("embedding_f1").is_null()); // reserved for a future metric
    const MetricsReport back = MetricsReport::fromJson(j);
    CHECK(back.system == rep.system);
    CHECK(back.numExamples == rep.numExamples);
    CHECK(back.bleu == rep.bleu);
    CHECK(back.tokenF1 == rep.tokenF1);
    CHECK(back.arousal.arousalSum == rep.arousal.arousalSum);
}

// ---- binomial a/b test --------------------------------------------------

TEST_CASE("ab test reproduces the 30-judgment example exactly") {
    const AbTestResult res = binomialAbTest(16, 7, 7, DrawPolicy::Exclude);
    CHECK(res.nEffective == 23);
    CHECK(res.wins == 16);
    CHECK(res.losses == 7);
    CHECK(res.draws == 7);
    CHECK(res.exactFraction == "390656/8388608");
    // 390656/2^23 is dyadic, so the double is exact.
    CHECK(res.pValue == 0.04656982421875);
}

TEST_CASE("ab test extreme and median tails") {
    for (std::size_t n : {1u, 5u, 20u, 30u}) {
        const AbTestResult res = binomialAbTest(n, 0, 0, DrawPolicy::Exclude);
        CHECK(res.pValue == std::ldexp(1.0, -static_cast<int>(n))); // 2^-n, exact
    }
    for (std::size_t half : {1u, 4u, 10u}) {
        const AbTestResult res = binomialAbTest(half, half, 0, DrawPolicy::Exclude);
        CHECK(res.pValue > 0.5);
    }
}

TEST_CASE("ab test matches the direct-summation oracle for all n <= 25") {
    for (std::size_t n = 1; n <= 25; ++n) {
        for (std::size_t k = 0; k <= n; ++k) {
            CAPTURE(n);
            CAPTURE(k);
            const AbTestResult res = binomialAbTest(k, n - k, 0, DrawPolicy::Exclude);
            const auto [p, frac] = binomialTailOracle(n, k);
            CHECK(res.exactFraction == frac);
            CHECK(res.pValue == doctest::Approx(p).epsilon(1e-14));
        }
    }
}

TEST_CASE("draw policies") {
    SUBCASE("exclude drops draws from n") {
        const AbTestResult res = binomialAbTest(3, 2, 5, DrawPolicy::Exclude);
        CHECK(res.nEffective == 5);
        CHECK(res.wins == 3);
        CHECK(res.draws == 5);
    }
    SUBCASE("split shares draws, odd remainder to the loser") {
        const AbTestResult res = binomialAbTest(3, 2, 5, DrawPolicy::Split);
        CHECK(res.wins == 5);   // 3 + 2
        CHECK(res.losses == 5); // 2 + 3
        CHECK(res.nEffective == 10);
    }
    SUBCASE("no decisive judgments is an error") {
        CHECK_THROWS_AS(binomialAbTest(0, 0, 0, DrawPolicy::Exclude), DataError);
        CHECK_THROWS_AS(binomialAbTest(0, 0, 3, DrawPolicy::Exclude), DataError);
        // ...but splitting those draws makes them count.
        CHECK(binomialAbTest(0, 0, 3, DrawPolicy::Split).nEffective == 3);
    }
}

TEST_CASE("ab test handles large n without overflow") {
    const AbTestResult res = binomialAbTest(70, 30, 0, DrawPolicy::Exclude);
    CHECK(res.pValue > 0.0);
    CHECK(res.pValue < 1e-4); // 70/100 wins is far out in the tail
    CHECK(res.exactFraction.find('/') != std::string::npos);
}

// ---- comparison ---------------------------------------------------------

TEST_CASE("compareSystems flags lower arousal and higher quality as better") {
    MetricsReport a;
    a.system = "polarity-min";
    a.numExamples = 10;
    a.arousal.arousalPos = 0.2;
    a.arousal.arousalNeg = 0.1;
    a.arousal.arousalSum = 0.3;
    a.bleu = 0.5;
    a.tokenF1 = 0.6;
    MetricsReport b = a;
    b.system = "baseline";
    b.arousal.arousalSum = 0.9;
    b.bleu = 0.4;

    const nlohmann::json cmp = compareSystems(a, b);
    const auto& metrics = cmp.at("metrics");
    CHECK(metrics.at("arousal_sum").at("better") == "a");
    CHECK(metrics.at("arousal_sum").at("direction") == "lower");
    CHECK(metrics.at("arousal_sum").at("delta").get<double>() ==
          doctest::Approx(0.6).epsilon(1e-12));
    CHECK(metrics.at("bleu").at("better") == "a");
    CHECK(metrics.at("bleu").at("direction") == "higher");
    CHECK(metrics.at("arousal_pos").at("better") == "tie");
    CHECK(metrics.at("token_f1").at("better") == "tie");

    const std::string table = renderComparisonTable(a, b);
    CHECK(table.find("arousal_sum") != std::string::npos);
    CHECK(table.find("lower wins") != std::string::npos);
    CHECK(table.find("polarity-min") != std::string::npos);
}
