#include "polarmin/dataset.hpp"

#include "polarmin/errors.hpp"
#include "polarmin/hash.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace polarmin {

using nlohmann::json;

char ideologyTag(Ideology ideology) {
    switch (ideology) {
    case Ideology::Left: return 'L';
    case Ideology::Right: return 'R';
    case Ideology::Center: return 'C';
    }
    return '?';
}

Ideology parseIdeologyTag(char tag) {
    switch (tag) {
    case 'L': return Ideology::Left;
    case 'R': return Ideology::Right;
    case 'C': return Ideology::Center;
    default: throw ConfigError(std::string("unknown ideology tag: ") + tag);
    }
}

const Article& articleFor(const PolarizedSet& record, Ideology ideology) {
    switch (ideology) {
    case Ideology::Left: return record.left;
    case Ideology::Right: return record.right;
    case Ideology::Center: return record.center;
    }
    return record.center;
}

namespace {

Article parseArticle(const json& j, std::size_t lineNo, const char* slot) {
    if (!j.is_object()) {
        std::ostringstream os;
        os << "line " << lineNo << ": field \"" << slot << "\" must be an object";
        throw DataError(os.str());
    }
    Article a;
    if (auto it = j.find("title"); it != j.end() && !it->is_null()) {
        a.title = it->get<std::string>();
    }
    auto textIt = j.find("text");
    if (textIt == j.end() || !textIt->is_string()) {
        std::ostringstream os;
        os << "line " << lineNo << ": field \"" << slot << ".text\" missing or not a string";
        throw DataError(os.str());
    }
    a.text = textIt->get<std::string>();
    return a;
}

json articleToJson(const Article& a) {
    json j;
    if (!a.title.empty()) j["title"] = a.title;
    j["text"] = a.text;
    return j;
}

} // namespace

std::vector<PolarizedSet> loadDataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open dataset file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw DataError("I/O failure while reading dataset: " + path);
    }
    try {
        return parseDatasetJsonl(buf.str());
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

std::vector<PolarizedSet> parseDatasetJsonl(const std::string& content) {
    std::istringstream in(content);
    std::vector<PolarizedSet> records;
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
        if (!j.is_object()) {
            std::ostringstream os;
            os << "line " << lineNo << ": record must be a JSON object";
            throw DataError(os.str());
        }

        PolarizedSet rec;
        auto idIt = j.find("id");
        if (idIt == j.end() || !idIt->is_string()) {
            std::ostringstream os;
            os << "line " << lineNo << ": field \"id\" missing or not a string";
            throw DataError(os.str());
        }
        rec.recordId = idIt->get<std::string>();
        if (auto it = j.find("issue"); it != j.end() && it->is_string()) {
            rec.issue = it->get<std::string>();
        }
        for (const char* slot : {"left", "right", "center", "target"}) {
            auto it = j.find(slot);
            if (it == j.end()) {
                std::ostringstream os;
                os << "line " << lineNo << ": field \"" << slot << "\" missing";
                throw DataError(os.str());
            }
            Article a = parseArticle(*it, lineNo, slot);
            if (slot[0] == 'l') rec.left = std::move(a);
            else if (slot[0] == 'r') rec.right = std::move(a);
            else if (slot[0] == 'c') rec.center = std::move(a);
            else rec.target = std::move(a);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::string datasetToJsonl(const std::vector<PolarizedSet>& records) {
    std::ostringstream out;
    for (const auto& rec : records) {
        json j;
        j["id"] = rec.recordId;
        if (!rec.issue.empty()) j["issue"] = rec.issue;
        j["left"] = articleToJson(rec.left);
        j["right"] = articleToJson(rec.right);
        j["center"] = articleToJson(rec.center);
        j["target"] = articleToJson(rec.target);
        out << j.dump() << '\n';
    }
    return out.str();
}

void saveDataset(const std::string& path, const std::vector<PolarizedSet>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot open dataset file for writing: " + path);
    }
    out << datasetToJsonl(records);
    if (!out) {
        throw DataError("I/O failure while writing dataset: " + path);
    }
}

Split splitOf(const std::string& recordId) {
    switch (fnv1a64(recordId) % 10) {
    case 0: return Split::Validation;
    case 1: return Split::Test;
    default: return Split::Train;
    }
}

std::vector<PolarizedSet> filterSplit(const std::vector<PolarizedSet>& records, Split split) {
    std::vector<PolarizedSet> out;
    for (const auto& rec : records) {
        if (splitOf(rec.recordId) == split) out.push_back(rec);
    }
    return out;
}

} // namespace polarmin
