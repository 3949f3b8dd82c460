#pragma once

#include "polarmin/batching.hpp"
#include "polarmin/evaluation.hpp"
#include "polarmin/model.hpp"
#include "polarmin/pair_selection.hpp"

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace polarmin {

// Which polar directions to train on. The single-direction settings drop the
// opposite L/R direction and keep everything else (center-source pairs from
// LRC variants are unaffected).
enum class Direction { Both, LeftToRight, RightToLeft };

std::string directionFlag(Direction d);               // "both" / "l2r" / "r2l"
Direction parseDirectionFlag(std::string_view flag);  // throws ConfigError

struct TrainConfig {
    double lambda = 0.0;
    std::optional<SelectionConfig> selection; // absent = summarization loss only
    Direction direction = Direction::Both;
    std::size_t epochs = 45;
    std::size_t patience = 45; // >= epochs: early stopping off by default
    std::size_t batchSize = 16;
    AdamHyper adam{.lr = 0.005}; // gentler than the optimizer default: the
                                 // mixed objective is noisier than plain MDS
    std::uint64_t seed = 12345;
    bool useTitles = false;
    LossNorm lossNorm = LossNorm::PerToken;
    std::size_t maxInLen = 160;
    std::size_t maxOutLen = 32;
    std::size_t embedDim = 32;
    std::size_t hiddenDim = 64;
    bool tieOutputEmbedding = true;
    std::size_t vocabMinCount = 1;
    std::size_t vocabMaxSize = 50000;

    void validate() const; // throws ConfigError
    nlohmann::json toJson() const;
    // Strict: unknown keys throw ConfigError (catches config-file typos).
    static TrainConfig fromJson(const nlohmann::json& j);
};

// Losses of one optimizer step. polar is 0 when no polar batch was attached.
struct StepLosses {
    double mds = 0.0;
    double polar = 0.0;
    double neut = 0.0;
};

// One combined update: gradient of (summarization loss + lambda * polarity
// loss) followed by a single Adam step. With lambda == 0 the polar gradient
// pass is skipped entirely, so the parameter trajectory is bit-identical to
// a summarization-only run.
StepLosses neutStep(ModelParams& params, const Batch& mdsBatch,
                    const Batch* polarBatch, double lambda, AdamState& adam,
                    const AdamHyper& hyper, LossNorm norm);

struct EpochStats {
    double trainMds = 0.0;   // means over the epoch's optimizer steps
    double trainPolar = 0.0; // counting steps without a polar batch as 0
    double trainNeut = 0.0;
    double valMds = 0.0;
    double valArousalSum = 0.0; // mean over greedy-decoded validation summaries
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    std::size_t bestEpoch = 0; // 0-based index of the lowest valMds

    nlohmann::json toJson() const;
};

struct TrainResult {
    Checkpoint checkpoint; // parameters and optimizer state of the best epoch
    TrainHistory history;
    std::size_t trainRecords = 0;
    std::size_t valRecords = 0;
    std::size_t testRecords = 0;
    std::size_t polarPairsUsed = 0;
};

// Full training run: hash-split the dataset, build the vocabulary from the
// train split, interleave polar batches among summarization batches, early
// stop on validation summarization loss, return the best epoch.
TrainResult train(const std::vector<PolarizedSet>& dataset,
                  const TrainConfig& config, const VadLexicon& lexicon);

// Renders each record's shuffled-concatenation input (permutations drawn
// from the "eval-permutation" stream of the checkpoint's seed), greedy
// decodes, and returns summaries aligned with the records.
std::vector<std::string> generateSummaries(const Checkpoint& ckpt,
                                           const std::vector<PolarizedSet>& records);

// generateSummaries + evaluateSystem against the records' target summaries.
MetricsReport evaluateModel(const Checkpoint& ckpt,
                            const std::vector<PolarizedSet>& records,
                            const VadLexicon& lexicon,
                            const std::string& systemName);

struct SweepRow {
    double lambda = 0.0;
    MetricsReport metrics;    // on the test split
    MetricsReport valMetrics; // on the validation split, for model selection
    std::size_t bestEpoch = 0;
    double valMds = 0.0;
};

struct SweepReport {
    std::vector<SweepRow> rows;

    nlohmann::json toJson() const;
    std::string toCsv() const;   // lambda,arousal_pos,arousal_neg,arousal_sum,bleu,token_f1
    std::string toText() const;  // aligned columns, same order
};

// Trains once per lambda value with otherwise identical configuration and
// seeds, evaluating each run on the test split. lambda == 0 rows are the
// summarization-only baseline.
SweepReport lambdaSweep(const std::vector<PolarizedSet>& dataset,
                        const TrainConfig& base, const std::vector<double>& lambdas,
                        const VadLexicon& lexicon);

// Model selection on the validation split: among nonzero-lambda rows whose
// validation token_f1 is within maxF1Drop of the lambda == 0 row's, returns
// the one with the lowest validation arousal_sum (ties -> smaller lambda).
// Returns nullptr when no nonzero row qualifies. Throws ConfigError when the
// report has no lambda == 0 baseline row to compare against.
const SweepRow* selectBestLambda(const SweepReport& report, double maxF1Drop = 0.05);

struct AblationRow {
    std::string label; // "both" / "-RtoL" / "-LtoR"
    MetricsReport metrics;
};

struct AblationReport {
    std::vector<AblationRow> rows;

    nlohmann::json toJson() const;
    std::string toText() const;
};

// Three runs differing only in the direction policy: both directions, minus
// right-to-left, minus left-to-right.
AblationReport ablateDirection(const std::vector<PolarizedSet>& dataset,
                               const TrainConfig& base, const VadLexicon& lexicon);

} // namespace polarmin
