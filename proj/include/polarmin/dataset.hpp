#pragma once

#include <string>
#include <vector>

namespace polarmin {

enum class Ideology { Left, Right, Center };

char ideologyTag(Ideology ideology);              // 'L' / 'R' / 'C'
Ideology parseIdeologyTag(char tag);              // throws ConfigError

// One outlet's coverage of an event. The ideology is implied by the slot the
// article occupies inside its PolarizedSet.
struct Article {
    std::string title; // empty = no title
    std::string text;
};

// A left/right/center triplet on one event plus the neutral target summary.
struct PolarizedSet {
    std::string recordId;
    std::string issue; // empty = not given
    Article left;
    Article right;
    Article center;
    Article target;
};

const Article& articleFor(const PolarizedSet& record, Ideology ideology);

// JSON Lines, one record per line:
//   {"id": ..., "issue"?: ..., "left": {"title"?: ..., "text": ...},
//    "right": {...}, "center": {...}, "target": {...}}
// Schema violations throw DataError naming the line and field. An empty file
// yields an empty sequence.
std::vector<PolarizedSet> loadDataset(const std::string& path);

// Same schema from an in-memory string; errors carry line numbers only.
std::vector<PolarizedSet> parseDatasetJsonl(const std::string& content);

void saveDataset(const std::string& path, const std::vector<PolarizedSet>& records);
std::string datasetToJsonl(const std::vector<PolarizedSet>& records);

enum class Split { Train, Validation, Test };

// Deterministic split by record id hash: bucket 0 of 10 is validation,
// bucket 1 is test, the rest train.
Split splitOf(const std::string& recordId);

std::vector<PolarizedSet> filterSplit(const std::vector<PolarizedSet>& records, Split split);

} // namespace polarmin
