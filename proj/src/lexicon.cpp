#include "polarmin/lexicon.hpp"

#include "polarmin/errors.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace polarmin {

namespace {

bool isBlank(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool isMarker(std::string_view tok) {
    return tok.size() >= 2 && tok.front() == '<' && tok.back() == '>';
}

std::string canonicalize(std::string_view raw, const TokenizerConfig& config) {
    if (config.protectMarkers && isMarker(raw)) {
        return std::string(raw);
    }
    std::size_t begin = 0;
    std::size_t end = raw.size();
    if (config.stripPunctuation) {
        while (begin < end && std::ispunct(static_cast<unsigned char>(raw[begin]))) ++begin;
        while (end > begin && std::ispunct(static_cast<unsigned char>(raw[end - 1]))) --end;
    }
    std::string out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
        char c = raw[i];
        if (config.lowercase) {
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        out.push_back(c);
    }
    return out;
}

bool parseDouble(std::string_view field, double& out) {
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

std::vector<std::string_view> splitTabs(std::string_view line) {
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            cols.push_back(line.substr(start));
            break;
        }
        cols.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return cols;
}

} // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && isBlank(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && !isBlank(text[i])) ++i;
        if (i > start) {
            std::string tok = canonicalize(text.substr(start, i - start), config);
            if (!tok.empty()) {
                tokens.push_back(std::move(tok));
            }
        }
    }
    return tokens;
}

std::optional<VadEntry> VadLexicon::lookup(std::string_view token) const {
    // Keys are stored folded, so fold the query the same way. Tokenized text
    // arrives pre-folded and the loop is then a cheap no-op pass.
    std::string key;
    key.reserve(token.size());
    for (char c : token) {
        if (!isBlank(c)) {
            key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void VadLexicon::insert(std::string_view word, VadEntry entry) {
    std::string key;
    key.reserve(word.size());
    for (char c : word) {
        if (!isBlank(c)) {
            key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    auto [it, fresh] = entries_.insert_or_assign(std::move(key), entry);
    (void)it;
    if (!fresh) ++duplicates_;
}

VadLexicon loadVadLexicon(const std::string& path, bool lenient) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open lexicon file: " + path);
    }

    VadLexicon lex;
    std::string line;
    std::size_t lineNo = 0;
    static const char* fieldNames[] = {"word", "valence", "arousal", "dominance"};

    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const auto cols = splitTabs(line);

        // Header detection: only line 1, only when the second column is not a number.
        if (lineNo == 1 && cols.size() >= 2) {
            double probe;
            if (!parseDouble(cols[1], probe)) continue;
        }

        auto fail = [&](const std::string& what) {
            if (lenient) {
                lex.skippedRows_++;
                return false;
            }
            std::ostringstream os;
            os << path << ":" << lineNo << ": " << what;
            throw DataError(os.str());
        };

        if (cols.size() != 4) {
            std::ostringstream os;
            os << "expected 4 tab-separated columns, got " << cols.size();
            if (!fail(os.str())) continue;
        }

        VadEntry entry;
        double* slots[3] = {&entry.valence, &entry.arousal, &entry.dominance};
        bool rowOk = true;
        for (int f = 1; f <= 3; ++f) {
            double v;
            if (!parseDouble(cols[static_cast<std::size_t>(f)], v)) {
                rowOk = fail(std::string("non-numeric field ") + fieldNames[f]);
                break;
            }
            if (v < 0.0 || v > 1.0) {
                rowOk = fail(std::string("field ") + fieldNames[f] + " out of range [0,1]");
                break;
            }
            *slots[f - 1] = v;
        }
        if (!rowOk) continue;
        if (cols[0].empty()) {
            if (!fail("empty word column")) continue;
        }
        lex.insert(cols[0], entry);
    }
    if (in.bad()) {
        throw DataError("I/O failure while reading lexicon: " + path);
    }
    return lex;
}

} // namespace polarmin
