#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "polarmin/errors.hpp"
#include "polarmin/lexicon.hpp"
#include "polarmin/rng.hpp"

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

using namespace polarmin;

namespace {

const std::string kDemoLexicon = std::string(POLARMIN_SOURCE_DIR) + "/data/demo_vad.tsv";

std::string writeTempTsv(const std::string& name, const std::string& body) {
    std::ofstream out(name, std::ios::trunc);
    out << body;
    return name;
}

std::string joinTokens(const std::vector<std::string>& tokens) {
    std::string s;
    for (const auto& t : tokens) {
        if (!s.empty()) s += ' ';
        s += t;
    }
    return s;
}

// Messy text with punctuation, case and stray whitespace.
std::string randomMessyText(Rng& rng, std::size_t maxLen) {
    static const char kChars[] = "abcXYZ.,!?\"'()- \t";
    const std::size_t len = rng.uniformInt(maxLen + 1);
    std::string s;
    for (std::size_t i = 0; i < len; ++i)
        s += kChars[rng.uniformInt(sizeof(kChars) - 1)];
    return s;
}

} // namespace

TEST_CASE("tokenize lowercases, strips edge punctuation and keeps order") {
    const auto toks = tokenize("  The Mayor's  plan, \"boldly\" -- announced!  ");
    CHECK(toks == std::vector<std::string>{"the", "mayor's", "plan", "boldly", "announced"});
}

TEST_CASE("tokenize preserves multiplicity") {
    const auto toks = tokenize("go go go stop go");
    CHECK(toks == std::vector<std::string>{"go", "go", "go", "stop", "go"});
}

TEST_CASE("tokenize drops tokens that strip to nothing") {
    CHECK(tokenize("... --- !!!").empty());
    CHECK(tokenize("").empty());
    CHECK(tokenize("   \t  \n ").empty());
}

TEST_CASE("tokenize protects marker tokens") {
    const auto toks = tokenize("Word <sep> Next <title> End.");
    CHECK(toks == std::vector<std::string>{"word", "<sep>", "next", "<title>", "end"});
}

TEST_CASE("tokenize honors disabled folding and stripping") {
    TokenizerConfig cfg;
    cfg.lowercase = false;
    cfg.stripPunctuation = false;
    const auto toks = tokenize("Hello, World!", cfg);
    CHECK(toks == std::vector<std::string>{"Hello,", "World!"});
}

TEST_CASE("tokenize keeps interior punctuation") {
    const auto toks = tokenize("it's a state-of-the-art co-op");
    CHECK(toks == std::vector<std::string>{"it's", "a", "state-of-the-art", "co-op"});
}

TEST_CASE("tokenize is idempotent on its own output") {
    Rng rng(2024, "tokenize-prop");
    for (int trial = 0; trial < 300; ++trial) {
        const std::string text = randomMessyText(rng, 48);
        const auto once = tokenize(text);
        const auto twice = tokenize(joinTokens(once));
        CAPTURE(text);
        CHECK(once == twice);
    }
}

TEST_CASE("demo lexicon loads with known shape") {
    const VadLexicon lex = loadVadLexicon(kDemoLexicon);
    CHECK(lex.size() == 170);
    CHECK(lex.duplicateCount() == 0);
    CHECK(lex.skippedRowCount() == 0);

    const auto outrage = lex.lookup("outrage");
    REQUIRE(outrage.has_value());
    CHECK(outrage->valence < 0.35);
    CHECK(outrage->arousal > 0.5);

    const auto triumph = lex.lookup("triumph");
    REQUIRE(triumph.has_value());
    CHECK(triumph->valence > 0.65);

    CHECK_FALSE(lex.lookup("notaword").has_value());
}

TEST_CASE("lexicon lookup folds case like the stored keys") {
    const VadLexicon lex = loadVadLexicon(kDemoLexicon);
    REQUIRE(lex.lookup("OUTRAGE").has_value());
    CHECK(lex.lookup("OUTRAGE")->arousal == lex.lookup("outrage")->arousal);
}

TEST_CASE("lexicon accepts headerless files") {
    const std::string path =
        writeTempTsv("lex_noheader.tsv", "calm\t0.5\t0.2\t0.5\nfury\t0.1\t0.9\t0.3\n");
    const VadLexicon lex = loadVadLexicon(path);
    CHECK(lex.size() == 2);
    CHECK(lex.lookup("fury")->arousal == doctest::Approx(0.9));
    std::remove(path.c_str());
}

TEST_CASE("strict load rejects malformed rows with line numbers") {
    SUBCASE("non-numeric field") {
        const std::string path =
            writeTempTsv("lex_badnum.tsv", "word\tvalence\tarousal\tdominance\ncalm\t0.5\toops\t0.5\n");
        CHECK_THROWS_WITH_AS(loadVadLexicon(path), doctest::Contains(":2:"), DataError);
        std::remove(path.c_str());
    }
    SUBCASE("out-of-range score") {
        const std::string path =
            writeTempTsv("lex_range.tsv", "calm\t0.5\t1.7\t0.5\n");
        CHECK_THROWS_AS(loadVadLexicon(path), DataError);
        std::remove(path.c_str());
    }
    SUBCASE("wrong column count") {
        const std::string path = writeTempTsv("lex_cols.tsv", "calm\t0.5\t0.4\n");
        CHECK_THROWS_AS(loadVadLexicon(path), DataError);
        std::remove(path.c_str());
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(loadVadLexicon("no_such_lexicon.tsv"), DataError);
    }
}

TEST_CASE("lenient load skips and counts bad rows") {
    const std::string path = writeTempTsv(
        "lex_lenient.tsv",
        "word\tvalence\tarousal\tdominance\n"
        "calm\t0.5\t0.2\t0.5\n"
        "broken\t0.5\toops\t0.5\n"
        "fury\t0.1\t0.9\t0.3\n"
        "outofrange\t2.0\t0.5\t0.5\n");
    const VadLexicon lex = loadVadLexicon(path, /*lenient=*/true);
    CHECK(lex.size() == 2);
    CHECK(lex.skippedRowCount() == 2);
    CHECK(lex.lookup("calm").has_value());
    CHECK_FALSE(lex.lookup("broken").has_value());
    std::remove(path.c_str());
}

TEST_CASE("duplicate rows keep the last value and are counted") {
    const std::string path = writeTempTsv(
        "lex_dup.tsv", "calm\t0.5\t0.2\t0.5\ncalm\t0.6\t0.3\t0.4\n");
    const VadLexicon lex = loadVadLexicon(path);
    CHECK(lex.size() == 1);
    CHECK(lex.duplicateCount() == 1);
    CHECK(lex.lookup("calm")->valence == doctest::Approx(0.6));
    std::remove(path.c_str());
}

TEST_CASE("insert and lookup fold the same way") {
    VadLexicon lex;
    lex.insert("Mixed", VadEntry{0.5, 0.5, 0.5});
    CHECK(lex.lookup("mixed").has_value());
    CHECK(lex.lookup("Mixed").has_value());
    CHECK(lex.lookup("MIXED").has_value());
}
