#include "polarmin/trainer.hpp"

#include "polarmin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace polarmin {

namespace {

std::string lossNormName(LossNorm n) {
    return n == LossNorm::PerToken ? "per_token" : "per_example";
}

LossNorm parseLossNorm(std::string_view s) {
    if (s == "per_token") return LossNorm::PerToken;
    if (s == "per_example") return LossNorm::PerExample;
    throw ConfigError("config: loss_norm must be per_token or per_example, got '"
                      + std::string(s) + "'");
}

bool dropPair(const PolarPair& p, Direction d) {
    if (d == Direction::Both) return false;
    if (d == Direction::LeftToRight) { // minus R-to-L
        return p.source == Ideology::Right && p.target == Ideology::Left;
    }
    return p.source == Ideology::Left && p.target == Ideology::Right; // minus L-to-R
}

// Encodes examples in order (no shuffle, no regrouping): one batch whose row
// r corresponds to examples[r]. Used for validation and evaluation where
// hypothesis/reference alignment matters.
Batch encodeAligned(const std::vector<std::pair<std::string, std::string>>& examples,
                    const Vocab& vocab, std::size_t maxInLen, std::size_t maxOutLen,
                    BatchKind kind) {
    Batch b;
    b.kind = kind;
    std::size_t wIn = 0, wOut = 0;
    for (const auto& [in, out] : examples) {
        b.inputIds.push_back(encode(in, vocab, maxInLen));
        b.targetIds.push_back(encode(out, vocab, maxOutLen));
        b.inputLengths.push_back(b.inputIds.back().size());
        b.targetLengths.push_back(b.targetIds.back().size());
        wIn = std::max(wIn, b.inputLengths.back());
        wOut = std::max(wOut, b.targetLengths.back());
    }
    for (auto& row : b.inputIds) row.resize(wIn, Vocab::kPad);
    for (auto& row : b.targetIds) row.resize(wOut, Vocab::kPad);
    return b;
}

std::string formatLambda(double lambda) {
    std::ostringstream os;
    os << lambda;
    return os.str();
}

} // namespace

std::string directionFlag(Direction d) {
    switch (d) {
    case Direction::Both: return "both";
    case Direction::LeftToRight: return "l2r";
    case Direction::RightToLeft: return "r2l";
    }
    throw ConfigError("unknown direction");
}

Direction parseDirectionFlag(std::string_view flag) {
    if (flag == "both") return Direction::Both;
    if (flag == "l2r") return Direction::LeftToRight;
    if (flag == "r2l") return Direction::RightToLeft;
    throw ConfigError("direction must be both, l2r or r2l; got '" + std::string(flag) + "'");
}

void TrainConfig::validate() const {
    if (lambda < 0.0 || !std::isfinite(lambda)) {
        throw ConfigError("train: lambda must be finite and nonnegative");
    }
    if (epochs == 0) throw ConfigError("train: epochs must be positive");
    if (batchSize == 0) throw ConfigError("train: batchSize must be positive");
    if (maxInLen < 2 || maxOutLen < 2) {
        throw ConfigError("train: sequence length caps must be at least 2");
    }
    if (adam.lr <= 0.0) throw ConfigError("train: learning rate must be positive");
    if (selection.has_value()) {
        if (selection->fraction <= 0.0 || selection->fraction > 1.0) {
            throw ConfigError("train: selection fraction must be in (0, 1]");
        }
    } else if (lambda > 0.0) {
        // Without pairs the polarity loss would silently never fire.
        throw ConfigError("train: nonzero lambda requires a selection variant");
    }
}

nlohmann::json TrainConfig::toJson() const {
    nlohmann::json j;
    j["lambda"] = lambda;
    j["variant"] = selection.has_value() ? nlohmann::json(variantFlag(selection->variant))
                                         : nlohmann::json(nullptr);
    j["fraction"] = selection.has_value() ? selection->fraction : 0.5;
    j["direction"] = directionFlag(direction);
    j["epochs"] = epochs;
    j["patience"] = patience;
    j["batch_size"] = batchSize;
    j["lr"] = adam.lr;
    j["adam_beta1"] = adam.beta1;
    j["adam_beta2"] = adam.beta2;
    j["adam_eps"] = adam.eps;
    j["seed"] = seed;
    j["use_titles"] = useTitles;
    j["loss_norm"] = lossNormName(lossNorm);
    j["max_in_len"] = maxInLen;
    j["max_out_len"] = maxOutLen;
    j["embed_dim"] = embedDim;
    j["hidden_dim"] = hiddenDim;
    j["tie_output_embedding"] = tieOutputEmbedding;
    j["vocab_min_count"] = vocabMinCount;
    j["vocab_max_size"] = vocabMaxSize;
    return j;
}

TrainConfig TrainConfig::fromJson(const nlohmann::json& j) {
    TrainConfig c;
    double fraction = c.selection.has_value() ? c.selection->fraction : 0.5;
    std::optional<SelectionVariant> variant;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "lambda") c.lambda = value.get<double>();
            else if (key == "variant") {
                if (!value.is_null() && value.get<std::string>() != "none") {
                    variant = parseVariantFlag(value.get<std::string>());
                }
            }
            else if (key == "fraction") fraction = value.get<double>();
            else if (key == "direction") c.direction = parseDirectionFlag(value.get<std::string>());
            else if (key == "epochs") c.epochs = value.get<std::size_t>();
            else if (key == "patience") c.patience = value.get<std::size_t>();
            else if (key == "batch_size") c.batchSize = value.get<std::size_t>();
            else if (key == "lr") c.adam.lr = value.get<double>();
            else if (key == "adam_beta1") c.adam.beta1 = value.get<double>();
            else if (key == "adam_beta2") c.adam.beta2 = value.get<double>();
            else if (key == "adam_eps") c.adam.eps = value.get<double>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else if (key == "use_titles") c.useTitles = value.get<bool>();
            else if (key == "loss_norm") c.lossNorm = parseLossNorm(value.get<std::string>());
            else if (key == "max_in_len") c.maxInLen = value.get<std::size_t>();
            else if (key == "max_out_len") c.maxOutLen = value.get<std::size_t>();
            else if (key == "embed_dim") c.embedDim = value.get<std::size_t>();
            else if (key == "hidden_dim") c.hiddenDim = value.get<std::size_t>();
            else if (key == "tie_output_embedding") c.tieOutputEmbedding = value.get<bool>();
            else if (key == "vocab_min_count") c.vocabMinCount = value.get<std::size_t>();
            else if (key == "vocab_max_size") c.vocabMaxSize = value.get<std::size_t>();
            else throw ConfigError("config: unknown key '" + key + "'");
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config: bad value for '" + key + "': " + e.what());
        }
    }
    if (variant.has_value()) {
        c.selection = SelectionConfig{*variant, fraction};
    }
    c.validate();
    return c;
}

StepLosses neutStep(ModelParams& params, const Batch& mdsBatch,
                    const Batch* polarBatch, double lambda, AdamState& adam,
                    const AdamHyper& hyper, LossNorm norm) {
    if (lambda < 0.0) throw ConfigError("neutStep: lambda must be nonnegative");
    TensorSet grads = zerosLike(params.tensors);
    StepLosses losses;
    losses.mds = batchLossGrad(params, mdsBatch, norm, grads).loss;
    if (polarBatch != nullptr) {
        if (lambda > 0.0) {
            TensorSet polarGrads = zerosLike(params.tensors);
            losses.polar = batchLossGrad(params, *polarBatch, norm, polarGrads).loss;
            forEachPair(grads, polarGrads, [&](const char*, Tensor& g, const Tensor& pg) {
                for (std::size_t i = 0; i < g.size(); ++i) g.data[i] += lambda * pg.data[i];
            });
        } else {
            // lambda == 0: report the loss but keep the gradients untouched so
            // the update is bit-identical to a summarization-only step.
            losses.polar = batchLoss(params, *polarBatch, norm).loss;
        }
    }
    losses.neut = losses.mds + lambda * losses.polar;
    adamStep(params.tensors, grads, adam, hyper);
    return losses;
}

nlohmann::json TrainHistory::toJson() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : epochs) {
        rows.push_back({{"train_mds", e.trainMds},
                        {"train_polar", e.trainPolar},
                        {"train_neut", e.trainNeut},
                        {"val_mds", e.valMds},
                        {"val_arousal_sum", e.valArousalSum}});
    }
    return {{"epochs", rows}, {"best_epoch", bestEpoch}};
}

TrainResult train(const std::vector<PolarizedSet>& dataset,
                  const TrainConfig& config, const VadLexicon& lexicon) {
    config.validate();
    if (dataset.empty()) throw DataError("train: empty dataset");
    auto trainRecs = filterSplit(dataset, Split::Train);
    auto valRecs = filterSplit(dataset, Split::Validation);
    auto testRecs = filterSplit(dataset, Split::Test);
    if (trainRecs.empty()) throw DataError("train: train split is empty");
    if (valRecs.empty()) {
        throw DataError("train: validation split is empty; need more records");
    }

    const Vocab vocab = Vocab::build(trainRecs, config.vocabMinCount, config.vocabMaxSize);

    ModelConfig mc;
    mc.vocabSize = vocab.size();
    mc.embedDim = config.embedDim;
    mc.hiddenDim = config.hiddenDim;
    mc.maxPositions = std::max(config.maxInLen, config.maxOutLen);
    mc.tieOutputEmbedding = config.tieOutputEmbedding;
    mc.validate();

    Rng initRng(config.seed, "init");
    ModelParams params = initModel(mc, initRng);
    AdamState adam = makeAdamState(params.tensors);

    std::unordered_map<std::string, const PolarizedSet*> byId;
    for (const auto& rec : trainRecs) byId[rec.recordId] = &rec;

    std::vector<PolarPair> pairs;
    if (config.selection.has_value()) {
        pairs = selectPairs(trainRecs, *config.selection, lexicon);
        std::erase_if(pairs, [&](const PolarPair& p) { return dropPair(p, config.direction); });
    }

    Rng mdsPermRng(config.seed, "mds-permutation");
    Rng mdsBatchRng(config.seed, "mds-batching");
    Rng polarBatchRng(config.seed, "polar-batching");
    Rng valPermRng(config.seed, "val-permutation");

    // validation inputs are rendered once so the early-stopping criterion is
    // not jittered by fresh permutations
    std::vector<std::pair<std::string, std::string>> valExamples;
    valExamples.reserve(valRecs.size());
    for (const auto& rec : valRecs) {
        valExamples.emplace_back(buildMdsInput(rec, config.useTitles, valPermRng),
                                 renderArticle(rec.target, config.useTitles));
    }
    const Batch valBatch = encodeAligned(valExamples, vocab, config.maxInLen,
                                         config.maxOutLen, BatchKind::Mds);

    TrainResult result;
    result.trainRecords = trainRecs.size();
    result.valRecords = valRecs.size();
    result.testRecords = testRecs.size();
    result.polarPairsUsed = pairs.size();

    double bestVal = std::numeric_limits<double>::infinity();
    std::size_t bestEpoch = 0;
    TensorSet bestTensors = params.tensors;
    AdamState bestAdam = adam;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<std::pair<std::string, std::string>> mdsExamples;
        mdsExamples.reserve(trainRecs.size());
        for (const auto& rec : trainRecs) {
            mdsExamples.emplace_back(buildMdsInput(rec, config.useTitles, mdsPermRng),
                                     renderArticle(rec.target, config.useTitles));
        }
        auto mdsBatches = buildBatches(mdsExamples, BatchKind::Mds, vocab, config.batchSize,
                                       config.maxInLen, config.maxOutLen, mdsBatchRng);

        std::vector<Batch> polarBatches;
        if (!pairs.empty()) {
            std::vector<std::pair<std::string, std::string>> polarExamples;
            polarExamples.reserve(pairs.size());
            for (const auto& p : pairs) {
                const PolarizedSet& rec = *byId.at(p.recordId);
                // The polarity flip is a mapping between article bodies: the
                // opposite outlet's headline is styling we cannot know from
                // the source, so only the body is supervised.
                polarExamples.emplace_back(
                    renderArticle(articleFor(rec, p.source), config.useTitles),
                    articleFor(rec, p.target).text);
            }
            polarBatches = buildBatches(polarExamples, BatchKind::Polar, vocab,
                                        config.batchSize, config.maxInLen,
                                        config.maxOutLen, polarBatchRng);
        }

        // one polar batch rides along every k-th summarization step
        const std::size_t k = polarBatches.empty()
                                  ? 0
                                  : (mdsBatches.size() + polarBatches.size() - 1)
                                        / polarBatches.size();
        std::size_t polarIdx = 0;
        double sumMds = 0.0, sumPolar = 0.0, sumNeut = 0.0;
        for (std::size_t i = 0; i < mdsBatches.size(); ++i) {
            const Batch* pb = nullptr;
            if (k > 0 && (i + 1) % k == 0 && polarIdx < polarBatches.size()) {
                pb = &polarBatches[polarIdx++];
            }
            const StepLosses losses = neutStep(params, mdsBatches[i], pb, config.lambda,
                                               adam, config.adam, config.lossNorm);
            sumMds += losses.mds;
            sumPolar += losses.polar;
            sumNeut += losses.neut;
        }

        EpochStats st;
        const double steps = static_cast<double>(mdsBatches.size());
        st.trainMds = sumMds / steps;
        st.trainPolar = sumPolar / steps;
        st.trainNeut = sumNeut / steps;
        st.valMds = batchLoss(params, valBatch, config.lossNorm).loss;

        std::vector<ArousalReport> valReports;
        valReports.reserve(valRecs.size());
        for (std::size_t r = 0; r < valRecs.size(); ++r) {
            std::vector<int> ids(valBatch.inputIds[r].begin(),
                                 valBatch.inputIds[r].begin()
                                     + static_cast<long>(valBatch.inputLengths[r]));
            const auto decoded = greedyDecode(params, ids, config.maxOutLen);
            const std::string text = decodeIds(decoded, vocab);
            valReports.push_back(arousalScores(text, lexicon));
        }
        st.valArousalSum = corpusArousal(valReports).arousalSum;
        result.history.epochs.push_back(st);

        if (st.valMds < bestVal) {
            bestVal = st.valMds;
            bestEpoch = epoch;
            bestTensors = params.tensors;
            bestAdam = adam;
        }
        if (epoch - bestEpoch >= config.patience) break;
    }

    result.history.bestEpoch = bestEpoch;
    result.checkpoint.params.config = mc;
    result.checkpoint.params.tensors = std::move(bestTensors);
    result.checkpoint.params.positions = params.positions;
    result.checkpoint.adam = std::move(bestAdam);
    result.checkpoint.hasAdamState = true;
    result.checkpoint.masterSeed = config.seed;
    result.checkpoint.vocab = vocab;
    result.checkpoint.meta = {{"use_titles", config.useTitles},
                              {"loss_norm", lossNormName(config.lossNorm)},
                              {"max_in_len", config.maxInLen},
                              {"max_out_len", config.maxOutLen}};
    return result;
}

std::vector<std::string> generateSummaries(const Checkpoint& ckpt,
                                           const std::vector<PolarizedSet>& records) {
    const bool useTitles = ckpt.meta.value("use_titles", false);
    const std::size_t maxInLen = ckpt.meta.value("max_in_len", std::size_t{160});
    const std::size_t maxOutLen = ckpt.meta.value("max_out_len", std::size_t{32});
    Rng permRng(ckpt.masterSeed, "eval-permutation");
    std::vector<std::string> out;
    out.reserve(records.size());
    for (const auto& rec : records) {
        const std::string input = buildMdsInput(rec, useTitles, permRng);
        const auto ids = encode(input, ckpt.vocab, maxInLen);
        const auto decoded = greedyDecode(ckpt.params, ids, maxOutLen);
        out.push_back(decodeIds(decoded, ckpt.vocab));
    }
    return out;
}

MetricsReport evaluateModel(const Checkpoint& ckpt,
                            const std::vector<PolarizedSet>& records,
                            const VadLexicon& lexicon,
                            const std::string& systemName) {
    if (records.empty()) throw DataError("evaluate: no records to evaluate on");
    const bool useTitles = ckpt.meta.value("use_titles", false);
    const auto hyps = generateSummaries(ckpt, records);
    std::vector<std::string> refs;
    refs.reserve(records.size());
    for (const auto& rec : records) refs.push_back(referenceText(rec.target, useTitles));
    return evaluateSystem(systemName, hyps, refs, lexicon);
}

nlohmann::json SweepReport::toJson() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json j = row.metrics.toJson();
        j["lambda"] = row.lambda;
        j["best_epoch"] = row.bestEpoch;
        j["val_mds"] = row.valMds;
        j["val"] = row.valMetrics.toJson();
        out.push_back(j);
    }
    return {{"rows", out}};
}

std::string SweepReport::toCsv() const {
    std::ostringstream os;
    os << "lambda,arousal_pos,arousal_neg,arousal_sum,bleu,token_f1\n";
    os << std::setprecision(10);
    for (const auto& row : rows) {
        os << row.lambda << ',' << row.metrics.arousal.arousalPos << ','
           << row.metrics.arousal.arousalNeg << ',' << row.metrics.arousal.arousalSum << ','
           << row.metrics.bleu << ',' << row.metrics.tokenF1 << '\n';
    }
    return os.str();
}

std::string SweepReport::toText() const {
    std::ostringstream os;
    os << std::left << std::setw(8) << "lambda" << std::right << std::setw(13) << "arousal_pos"
       << std::setw(13) << "arousal_neg" << std::setw(13) << "arousal_sum" << std::setw(10)
       << "bleu" << std::setw(10) << "token_f1" << '\n';
    os << std::string(67, '-') << '\n';
    os << std::fixed << std::setprecision(4);
    for (const auto& row : rows) {
        os << std::left << std::setw(8) << formatLambda(row.lambda) << std::right
           << std::setw(13) << row.metrics.arousal.arousalPos << std::setw(13)
           << row.metrics.arousal.arousalNeg << std::setw(13) << row.metrics.arousal.arousalSum
           << std::setw(10) << row.metrics.bleu << std::setw(10) << row.metrics.tokenF1 << '\n';
    }
    return os.str();
}

SweepReport lambdaSweep(const std::vector<PolarizedSet>& dataset,
                        const TrainConfig& base, const std::vector<double>& lambdas,
                        const VadLexicon& lexicon) {
    if (lambdas.empty()) throw ConfigError("sweep: need at least one lambda value");
    const auto valRecs = filterSplit(dataset, Split::Validation);
    const auto testRecs = filterSplit(dataset, Split::Test);
    if (testRecs.empty()) throw DataError("sweep: test split is empty; need more records");
    if (valRecs.empty()) throw DataError("sweep: validation split is empty; need more records");

    SweepReport report;
    for (const double lambda : lambdas) {
        TrainConfig cfg = base;
        cfg.lambda = lambda;
        if (lambda > 0.0 && !cfg.selection.has_value()) {
            throw ConfigError("sweep: nonzero lambda requires a selection variant");
        }
        const TrainResult res = train(dataset, cfg, lexicon);
        SweepRow row;
        row.lambda = lambda;
        row.bestEpoch = res.history.bestEpoch;
        row.valMds = res.history.epochs[res.history.bestEpoch].valMds;
        row.metrics = evaluateModel(res.checkpoint, testRecs, lexicon,
                                    "lambda=" + formatLambda(lambda));
        row.valMetrics = evaluateModel(res.checkpoint, valRecs, lexicon,
                                       "val/lambda=" + formatLambda(lambda));
        report.rows.push_back(std::move(row));
    }
    return report;
}

const SweepRow* selectBestLambda(const SweepReport& report, double maxF1Drop) {
    const SweepRow* baseline = nullptr;
    for (const auto& row : report.rows) {
        if (row.lambda == 0.0) {
            baseline = &row;
            break;
        }
    }
    if (baseline == nullptr) {
        throw ConfigError("sweep selection needs a lambda == 0 baseline row");
    }
    const SweepRow* best = nullptr;
    for (const auto& row : report.rows) {
        if (row.lambda <= 0.0) continue;
        if (baseline->valMetrics.tokenF1 - row.valMetrics.tokenF1 > maxF1Drop) continue;
        if (best == nullptr ||
            row.valMetrics.arousal.arousalSum < best->valMetrics.arousal.arousalSum ||
            (row.valMetrics.arousal.arousalSum == best->valMetrics.arousal.arousalSum &&
             row.lambda < best->lambda)) {
            best = &row;
        }
    }
    return best;
}

nlohmann::json AblationReport::toJson() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json j = row.metrics.toJson();
        j["label"] = row.label;
        out.push_back(j);
    }
    return {{"rows", out}};
}

std::string AblationReport::toText() const {
    std::ostringstream os;
    os << std::left << std::setw(8) << "row" << std::right << std::setw(13) << "arousal_pos"
       << std::setw(13) << "arousal_neg" << std::setw(13) << "arousal_sum" << std::setw(10)
       << "bleu" << std::setw(10) << "token_f1" << '\n';
    os << std::string(67, '-') << '\n';
    os << std::fixed << std::setprecision(4);
    for (const auto& row : rows) {
        os << std::left << std::setw(8) << row.label << std::right << std::setw(13)
           << row.metrics.arousal.arousalPos << std::setw(13) << row.metrics.arousal.arousalNeg
           << std::setw(13) << row.metrics.arousal.arousalSum << std::setw(10)
           << row.metrics.bleu << std::setw(10) << row.metrics.tokenF1 << '\n';
    }
    return os.str();
}

AblationReport ablateDirection(const std::vector<PolarizedSet>& dataset,
                               const TrainConfig& base, const VadLexicon& lexicon) {
    if (!base.selection.has_value() || base.lambda <= 0.0) {
        throw ConfigError("ablate: needs a selection variant and a positive lambda");
    }
    const auto testRecs = filterSplit(dataset, Split::Test);
    if (testRecs.empty()) throw DataError("ablate: test split is empty; need more records");

    const std::pair<const char*, Direction> runs[] = {
        {"both", Direction::Both},
        {"-RtoL", Direction::LeftToRight},
        {"-LtoR", Direction::RightToLeft},
    };
    AblationReport report;
    for (const auto& [label, dir] : runs) {
        TrainConfig cfg = base;
        cfg.direction = dir;
        const TrainResult res = train(dataset, cfg, lexicon);
        report.rows.push_back({label, evaluateModel(res.checkpoint, testRecs, lexicon, label)});
    }
    return report;
}

} // namespace polarmin
