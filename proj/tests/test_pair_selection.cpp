#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "polarmin/errors.hpp"
#include "polarmin/pair_selection.hpp"
#include "polarmin/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

using namespace polarmin;

namespace {

// Independent symmetric-difference oracle over std::set.
std::size_t uniqueNumOracle(const std::string& a, const std::string& b) {
    const auto ta = tokenize(a);
    const auto tb = tokenize(b);
    const std::set<std::string> sa(ta.begin(), ta.end());
    const std::set<std::string> sb(tb.begin(), tb.end());
    std::vector<std::string> diff;
    std::set_symmetric_difference(sa.begin(), sa.end(), sb.begin(), sb.end(),
                                  std::back_inserter(diff));
    return diff.size();
}

std::string randomWordText(Rng& rng, const std::vector<std::string>& pool,
                           std::size_t minWords, std::size_t maxWords) {
    const std::size_t n = minWords + rng.uniformInt(maxWords - minWords + 1);
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        if (!s.empty()) s += ' ';
        s += pool[rng.uniformInt(pool.size())];
    }
    return s;
}

// Pool of short synthetic words w0..w39 with lexicon entries spread across
// the valence/arousal grid so every variant has signal.
struct TestWorld {
    std::vector<std::string> pool;
    VadLexicon lexicon;
};

TestWorld makeWorld(Rng& rng) {
    TestWorld world;
    for (int i = 0; i < 40; ++i) {
        const std::string w = "w" + std::to_string(i);
        world.pool.push_back(w);
        VadEntry e;
        e.valence = rng.uniformReal(0.0, 1.0);
        e.arousal = rng.uniformReal(0.0, 1.0);
        e.dominance = 0.5;
        world.lexicon.insert(w, e);
    }
    return world;
}

std::vector<PolarizedSet> randomDataset(Rng& rng, const std::vector<std::string>& pool,
                                        std::size_t n) {
    std::vector<PolarizedSet> records;
    for (std::size_t i = 0; i < n; ++i) {
        PolarizedSet rec;
        rec.recordId = "rec-" + std::to_string(100 + i); // sortable, unique
        rec.left.text = randomWordText(rng, pool, 3, 10);
        rec.right.text = randomWordText(rng, pool, 3, 10);
        rec.center.text = randomWordText(rng, pool, 3, 10);
        rec.target.text = randomWordText(rng, pool, 2, 6);
        records.push_back(std::move(rec));
    }
    return records;
}

// Reference implementation: score, sort, threshold, expand. Kept deliberately
// naive (string sort keys, full copies) so it shares no code with the library.
std::vector<PolarPair> selectPairsOracle(const std::vector<PolarizedSet>& dataset,
                                         const SelectionConfig& config,
                                         const VadLexicon& lexicon) {
    struct Row {
        std::string recordId;
        double distance;
        Ideology a, b;
    };
    const bool lrc = config.variant == SelectionVariant::LrcFlipAros ||
                     config.variant == SelectionVariant::LrcInfo;
    auto dist = [&](const PolarizedSet& r, Ideology x, Ideology y) {
        const std::string& ta = articleFor(r, x).text;
        const std::string& tb = articleFor(r, y).text;
        switch (config.variant) {
        case SelectionVariant::LrValence:
            return lexicalDistance(ta, tb, lexicon, LexicalDimension::Valence);
        case SelectionVariant::LrArousal:
        case SelectionVariant::LrcFlipAros:
            return lexicalDistance(ta, tb, lexicon, LexicalDimension::Arousal);
        default:
            return static_cast<double>(uniqueNumOracle(ta, tb));
        }
    };
    std::vector<Row> rows;
    for (const auto& rec : dataset) {
        Row best{rec.recordId, dist(rec, Ideology::Left, Ideology::Right),
                 Ideology::Left, Ideology::Right};
        if (lrc) {
            const Row lc{rec.recordId, dist(rec, Ideology::Left, Ideology::Center),
                         Ideology::Left, Ideology::Center};
            const Row rc{rec.recordId, dist(rec, Ideology::Right, Ideology::Center),
                         Ideology::Right, Ideology::Center};
            // Strictly-greater keeps the earlier combination on ties.
            if (lc.distance > best.distance) best = lc;
            if (rc.distance > best.distance) best = rc;
        }
        rows.push_back(best);
    }
    std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
        if (x.distance != y.distance) return x.distance > y.distance;
        return x.recordId < y.recordId;
    });
    const std::size_t keep = static_cast<std::size_t>(
        std::ceil(config.fraction * static_cast<double>(dataset.size())));
    std::vector<PolarPair> out;
    for (std::size_t i = 0; i < keep && i < rows.size(); ++i) {
        const Row& r = rows[i];
        for (auto [src, tgt] : {std::pair{r.a, r.b}, std::pair{r.b, r.a}}) {
            if (tgt == Ideology::Center) continue;
            PolarPair p;
            p.recordId = r.recordId;
            p.source = src;
            p.target = tgt;
            p.distance = r.distance;
            p.variant = config.variant;
            out.push_back(p);
        }
    }
    return out;
}

bool samePair(const PolarPair& a, const PolarPair& b) {
    return a.recordId == b.recordId && a.source == b.source && a.target == b.target &&
           a.distance == b.distance && a.variant == b.variant;
}

} // namespace

TEST_CASE("uniqueNum golden cases") {
    CHECK(uniqueNum("a b c", "b c d e") == 3);
    CHECK(uniqueNum("same text here", "same text here") == 0);
    CHECK(uniqueNum("", "") == 0);
    CHECK(uniqueNum("only left side", "") == 3);
    CHECK(uniqueNum("a a a b", "b") == 1);       // multiplicity ignored
    CHECK(uniqueNum("A b!", "a c") == 2);        // tokenizer folds case/punct
}

TEST_CASE("uniqueNum is symmetric and matches the set oracle") {
    Rng rng(77, "uniquenum-prop");
    static const char* kWords[] = {"ar", "bo", "ci", "du", "el", "fa", "gu", "ha"};
    for (int trial = 0; trial < 400; ++trial) {
        std::string a, b;
        const std::size_t la = rng.uniformInt(12);
        const std::size_t lb = rng.uniformInt(12);
        for (std::size_t i = 0; i < la; ++i) {
            a += kWords[rng.uniformInt(8)];
            a += ' ';
        }
        for (std::size_t i = 0; i < lb; ++i) {
            b += kWords[rng.uniformInt(8)];
            b += ' ';
        }
        CAPTURE(a);
        CAPTURE(b);
        CHECK(uniqueNum(a, b) == uniqueNumOracle(a, b));
        CHECK(uniqueNum(a, b) == uniqueNum(b, a));
    }
}

TEST_CASE("lexicalDistance matches the mean-difference oracle") {
    VadLexicon lex;
    lex.insert("hot", VadEntry{0.5, 0.8, 0.5});
    lex.insert("cold", VadEntry{0.5, 0.2, 0.5});
    lex.insert("good", VadEntry{0.9, 0.5, 0.5});
    lex.insert("bad", VadEntry{0.1, 0.5, 0.5});
    // a: mean arousal (0.8+0.2)/2 = 0.5; b: 0.8. |diff| = 0.3.
    CHECK(lexicalDistance("hot cold", "hot", lex, LexicalDimension::Arousal) ==
          doctest::Approx(0.3).epsilon(1e-12));
    // Valence: a mean (0.9+0.1)/2 = 0.5, b = 0.9.
    CHECK(lexicalDistance("good bad", "good", lex, LexicalDimension::Valence) ==
          doctest::Approx(0.4).epsilon(1e-12));
    // No covered tokens on one side contributes 0 for that side.
    CHECK(lexicalDistance("zzz", "good", lex, LexicalDimension::Valence) ==
          doctest::Approx(0.9).epsilon(1e-12));
    CHECK(lexicalDistance("zzz", "qqq", lex, LexicalDimension::Valence) == 0.0);
}

TEST_CASE("variant names and flags round trip") {
    for (auto v : {SelectionVariant::LrValence, SelectionVariant::LrArousal,
                   SelectionVariant::LrInfo, SelectionVariant::LrcFlipAros,
                   SelectionVariant::LrcInfo}) {
        CHECK(parseVariantFlag(variantFlag(v)) == v);
        CHECK(parseVariantFlag(variantName(v)) == v);
    }
    CHECK(variantName(SelectionVariant::LrInfo) == "LR-Info");
    CHECK(variantName(SelectionVariant::LrcFlipAros) == "LRC-flip-Aros");
    CHECK_THROWS_AS(parseVariantFlag("lr-bogus"), ConfigError);
}

TEST_CASE("selectPairs validates its inputs") {
    Rng rng(5, "world");
    TestWorld world = makeWorld(rng);
    const auto dataset = randomDataset(rng, world.pool, 4);
    SelectionConfig cfg;
    cfg.fraction = 0.0;
    CHECK_THROWS_AS(selectPairs(dataset, cfg, world.lexicon), ConfigError);
    cfg.fraction = 1.5;
    CHECK_THROWS_AS(selectPairs(dataset, cfg, world.lexicon), ConfigError);
    cfg.fraction = 0.5;
    CHECK_THROWS_AS(selectPairs({}, cfg, world.lexicon), ConfigError);

    auto missing = dataset;
    missing[1].right.text.clear();
    CHECK_THROWS_WITH_AS(selectPairs(missing, cfg, world.lexicon),
                         doctest::Contains(missing[1].recordId.c_str()), DataError);
}

TEST_CASE("selectPairs matches the sort-and-threshold oracle") {
    Rng rng(31337, "select-prop");
    const SelectionVariant variants[] = {
        SelectionVariant::LrValence, SelectionVariant::LrArousal, SelectionVariant::LrInfo,
        SelectionVariant::LrcFlipAros, SelectionVariant::LrcInfo};
    for (int trial = 0; trial < 40; ++trial) {
        TestWorld world = makeWorld(rng);
        const std::size_t n = 1 + rng.uniformInt(12);
        const auto dataset = randomDataset(rng, world.pool, n);
        SelectionConfig cfg;
        cfg.variant = variants[trial % 5];
        cfg.fraction = rng.uniformReal(0.05, 1.0);
        const auto got = selectPairs(dataset, cfg, world.lexicon);
        const auto want = selectPairsOracle(dataset, cfg, world.lexicon);
        CAPTURE(trial);
        CAPTURE(variantName(cfg.variant));
        CAPTURE(cfg.fraction);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CAPTURE(i);
            CHECK(samePair(got[i], want[i]));
        }
        // Structural invariants, independent of the oracle.
        const std::size_t keep =
            static_cast<std::size_t>(std::ceil(cfg.fraction * static_cast<double>(n)));
        const bool lrc = cfg.variant == SelectionVariant::LrcFlipAros ||
                         cfg.variant == SelectionVariant::LrcInfo;
        if (!lrc) CHECK(got.size() == 2 * keep);
        for (const auto& p : got) {
            CHECK(p.target != Ideology::Center); // targets are polarity ends
            CHECK(p.distance >= 0.0);
        }
    }
}

TEST_CASE("lr variants emit both directions for every kept record") {
    Rng rng(99, "world");
    TestWorld world = makeWorld(rng);
    const auto dataset = randomDataset(rng, world.pool, 6);
    SelectionConfig cfg;
    cfg.variant = SelectionVariant::LrInfo;
    cfg.fraction = 0.5; // ceil(0.5 * 6) = 3 records, 6 pairs
    const auto pairs = selectPairs(dataset, cfg, world.lexicon);
    REQUIRE(pairs.size() == 6);
    for (std::size_t i = 0; i < pairs.size(); i += 2) {
        CHECK(pairs[i].recordId == pairs[i + 1].recordId);
        CHECK(pairs[i].source == pairs[i + 1].target);
        CHECK(pairs[i].target == pairs[i + 1].source);
    }
}

TEST_CASE("pair manifest round trips through jsonl") {
    Rng rng(123, "world");
    TestWorld world = makeWorld(rng);
    const auto dataset = randomDataset(rng, world.pool, 5);
    SelectionConfig cfg;
    cfg.variant = SelectionVariant::LrcInfo;
    cfg.fraction = 0.8;
    const auto pairs = selectPairs(dataset, cfg, world.lexicon);
    REQUIRE_FALSE(pairs.empty());

    const std::string path = "pairs_roundtrip_test.jsonl";
    savePairManifest(path, pairs);
    const auto back = loadPairManifest(path);
    std::remove(path.c_str());
    REQUIRE(back.size() == pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) CHECK(samePair(pairs[i], back[i]));

    // One line per pair, each a self-contained json object.
    const std::string jsonl = pairsToJsonl(pairs);
    CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == static_cast<long>(pairs.size()));
}

TEST_CASE("loadPairManifest rejects malformed lines") {
    const std::string path = "pairs_bad_test.jsonl";
    {
        std::FILE* f = std::fopen(path.c_str(), "wb");
        REQUIRE(f != nullptr);
        std::fputs("{\"record_id\": \"r1\", \"source_ideology\": \"L\"}\n", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(loadPairManifest(path), DataError);
    std::remove(path.c_str());
}
