#include "polarmin/batching.hpp"
#include "polarmin/bias_metrics.hpp"
#include "polarmin/dataset.hpp"
#include "polarmin/errors.hpp"
#include "polarmin/evaluation.hpp"
#include "polarmin/hash.hpp"
#include "polarmin/lexicon.hpp"
#include "polarmin/manifest.hpp"
#include "polarmin/model.hpp"
#include "polarmin/pair_selection.hpp"
#include "polarmin/synth.hpp"
#include "polarmin/trainer.hpp"
#include "polarmin/vocab.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace {

using namespace polarmin;
namespace fs = std::filesystem;

std::string joinPath(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

nlohmann::json parseJsonFile(const std::string& path, const char* what) {
    try {
        return nlohmann::json::parse(readTextFile(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string(what) + ": invalid JSON in " + path + ": " + e.what());
    }
}

std::optional<Split> parseSplitFlag(const std::string& s) {
    if (s == "all") return std::nullopt;
    if (s == "train") return Split::Train;
    if (s == "val") return Split::Validation;
    if (s == "test") return Split::Test;
    throw ConfigError("--split must be train, val, test or all; got '" + s + "'");
}

std::vector<PolarizedSet> loadSplit(const std::string& path, const std::string& splitFlag) {
    auto records = loadDataset(path);
    if (const auto split = parseSplitFlag(splitFlag)) {
        records = filterSplit(records, *split);
    }
    return records;
}

// Shared flag block for the training-style subcommands. Values only take
// effect when the flag (or a config file key) was actually given.
struct TrainCliOpts {
    std::string dataset;
    std::string lexicon;
    std::string configPath;
    std::string variant;
    std::string direction = "both";
    double lambda = 0.0;
    double fraction = 0.5;
    double lr = 0.0;
    std::uint64_t seed = 12345;
    std::size_t epochs = 0;
    std::size_t patience = 0;
    std::size_t batchSize = 0;
    std::size_t maxInLen = 0;
    std::size_t maxOutLen = 0;
    std::size_t embedDim = 0;
    std::size_t hiddenDim = 0;
    bool useTitles = false;
    bool paperNorm = false;
    bool lenient = false;
    std::string out = "out";
};

void addCommonTrainOptions(CLI::App* cmd, TrainCliOpts& o, bool requireData) {
    auto* ds = cmd->add_option("--dataset", o.dataset, "Dataset JSONL path");
    auto* lx = cmd->add_option("--lexicon", o.lexicon, "VAD lexicon TSV path");
    if (requireData) {
        ds->required();
        lx->required();
    }
    cmd->add_option("--config", o.configPath, "Flat JSON config file (flags override)");
    cmd->add_option("--variant", o.variant,
                    "Pair selection variant (lr-valence|lr-arousal|lr-info|lrc-flip-aros|lrc-info)");
    cmd->add_option("--fraction", o.fraction, "Fraction of records kept by selection, in (0,1]");
    cmd->add_option("--lambda", o.lambda, "Polarity loss weight");
    cmd->add_option("--direction", o.direction, "Polar directions: both|l2r|r2l");
    cmd->add_flag("--use-titles", o.useTitles, "Prefix articles with their titles");
    cmd->add_flag("--paper-norm", o.paperNorm, "Normalize losses per example instead of per token");
    cmd->add_flag("--lenient", o.lenient, "Skip malformed lexicon rows instead of failing");
    cmd->add_option("--seed", o.seed, "Master seed for all randomness");
    cmd->add_option("--epochs", o.epochs, "Training epochs");
    cmd->add_option("--patience", o.patience, "Early stopping patience (0 = single epoch)");
    cmd->add_option("--batch-size", o.batchSize, "Examples per optimizer step");
    cmd->add_option("--lr", o.lr, "Adam learning rate");
    cmd->add_option("--max-in-len", o.maxInLen, "Encoder length cap (ids, BOS/EOS included)");
    cmd->add_option("--max-out-len", o.maxOutLen, "Decoder length cap");
    cmd->add_option("--embed-dim", o.embedDim, "Embedding width");
    cmd->add_option("--hidden-dim", o.hiddenDim, "Feed-forward width");
    cmd->add_option("--out", o.out, "Output directory");
}

TrainConfig resolveTrainConfig(const CLI::App* cmd, const TrainCliOpts& o) {
    TrainConfig cfg;
    if (!o.configPath.empty()) {
        cfg = TrainConfig::fromJson(parseJsonFile(o.configPath, "config"));
    }
    if (cmd->count("--lambda") > 0) cfg.lambda = o.lambda;
    if (cmd->count("--variant") > 0) {
        SelectionConfig sel;
        sel.variant = parseVariantFlag(o.variant);
        sel.fraction = cfg.selection ? cfg.selection->fraction : 0.5;
        cfg.selection = sel;
    }
    if (cmd->count("--fraction") > 0) {
        if (!cfg.selection) {
            throw ConfigError("--fraction needs --variant (or a variant in the config file)");
        }
        cfg.selection->fraction = o.fraction;
    }
    if (cmd->count("--direction") > 0) cfg.direction = parseDirectionFlag(o.direction);
    if (cmd->count("--use-titles") > 0) cfg.useTitles = true;
    if (cmd->count("--paper-norm") > 0) cfg.lossNorm = LossNorm::PerExample;
    if (cmd->count("--seed") > 0) cfg.seed = o.seed;
    if (cmd->count("--epochs") > 0) cfg.epochs = o.epochs;
    if (cmd->count("--patience") > 0) cfg.patience = o.patience;
    if (cmd->count("--batch-size") > 0) cfg.batchSize = o.batchSize;
    if (cmd->count("--lr") > 0) cfg.adam.lr = o.lr;
    if (cmd->count("--max-in-len") > 0) cfg.maxInLen = o.maxInLen;
    if (cmd->count("--max-out-len") > 0) cfg.maxOutLen = o.maxOutLen;
    if (cmd->count("--embed-dim") > 0) cfg.embedDim = o.embedDim;
    if (cmd->count("--hidden-dim") > 0) cfg.hiddenDim = o.hiddenDim;
    cfg.validate();
    return cfg;
}

void saveGenerations(const std::string& path, const std::vector<PolarizedSet>& records,
                     const std::vector<std::string>& texts) {
    std::ostringstream os;
    for (std::size_t i = 0; i < records.size(); ++i) {
        os << nlohmann::json{{"record_id", records[i].recordId}, {"text", texts[i]}}.dump()
           << '\n';
    }
    writeTextFile(path, os.str());
}

std::vector<std::pair<std::string, std::string>> loadGenerations(const std::string& path) {
    std::istringstream in(readTextFile(path));
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            out.emplace_back(j.at("record_id").get<std::string>(),
                             j.at("text").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + ":" + std::to_string(lineNo) + ": bad generation row: "
                            + e.what());
        }
    }
    return out;
}

// ---- subcommand bodies --------------------------------------------------

int runScore(const TrainCliOpts& o) {
    const auto dataset = loadDataset(o.dataset);
    const auto lexicon = loadVadLexicon(o.lexicon, o.lenient);
    if (dataset.empty()) throw DataError("score: dataset is empty: " + o.dataset);

    const nlohmann::json resolved = {{"dataset", o.dataset},
                                     {"lexicon", o.lexicon},
                                     {"lenient", o.lenient}};

    nlohmann::json perRecord = nlohmann::json::array();
    std::vector<ArousalReport> left, right, center, target, sources;
    for (const auto& rec : dataset) {
        const auto l = arousalScores(rec.left.text, lexicon);
        const auto r = arousalScores(rec.right.text, lexicon);
        const auto c = arousalScores(rec.center.text, lexicon);
        const auto t = arousalScores(rec.target.text, lexicon);
        left.push_back(l); right.push_back(r); center.push_back(c); target.push_back(t);
        sources.push_back(l); sources.push_back(r); sources.push_back(c);
        perRecord.push_back({{"record_id", rec.recordId},
                             {"left", l.toJson()},
                             {"right", r.toJson()},
                             {"center", c.toJson()},
                             {"target", t.toJson()}});
    }
    nlohmann::json report;
    report["per_record"] = perRecord;
    report["corpus"] = {{"left", corpusArousal(left).toJson()},
                        {"right", corpusArousal(right).toJson()},
                        {"center", corpusArousal(center).toJson()},
                        {"target", corpusArousal(target).toJson()},
                        {"sources", corpusArousal(sources).toJson()}};
    report["meta"] = artifactMeta("score", resolved, o.seed);

    const std::string reportPath = joinPath(o.out, "score_report.json");
    writeTextFile(reportPath, report.dump(2) + "\n");

    RunManifest manifest;
    manifest.subcommand = "score";
    manifest.resolvedConfig = resolved;
    manifest.seed = o.seed;
    manifest.inputs = {{o.dataset, fileDigest(o.dataset)}, {o.lexicon, fileDigest(o.lexicon)}};
    manifest.outputs = {{reportPath, fileDigest(reportPath)}};
    writeRunManifest(o.out, manifest);

    std::cout << "scored " << dataset.size() << " records -> " << reportPath << '\n';
    std::cout << "corpus arousal_sum: sources "
              << report["corpus"]["sources"]["arousal_sum"].get<double>() << ", targets "
              << report["corpus"]["target"]["arousal_sum"].get<double>() << '\n';
    return 0;
}

int runSelectPairs(const CLI::App* cmd, const TrainCliOpts& o) {
    if (cmd->count("--variant") == 0) throw ConfigError("select-pairs: --variant is required");
    const auto dataset = loadDataset(o.dataset);
    const auto lexicon = loadVadLexicon(o.lexicon, o.lenient);

    SelectionConfig sel;
    sel.variant = parseVariantFlag(o.variant);
    sel.fraction = o.fraction;
    const auto pairs = selectPairs(dataset, sel, lexicon);

    const nlohmann::json resolved = {{"dataset", o.dataset},
                                     {"lexicon", o.lexicon},
                                     {"variant", variantFlag(sel.variant)},
                                     {"fraction", sel.fraction},
                                     {"lenient", o.lenient}};
    const std::string pairsPath = joinPath(o.out, "pairs.jsonl");
    writeTextFile(pairsPath, pairsToJsonl(pairs));

    RunManifest manifest;
    manifest.subcommand = "select-pairs";
    manifest.resolvedConfig = resolved;
    manifest.seed = o.seed;
    manifest.inputs = {{o.dataset, fileDigest(o.dataset)}, {o.lexicon, fileDigest(o.lexicon)}};
    manifest.outputs = {{pairsPath, fileDigest(pairsPath)}};
    writeRunManifest(o.out, manifest);

    std::cout << "selected " << pairs.size() << " directed pairs (" << variantName(sel.variant)
              << ", fraction " << sel.fraction << ") -> " << pairsPath << '\n';
    return 0;
}

struct SynthCliOpts {
    std::string lexicon;
    std::size_t records = 500;
    std::size_t coreMin = 6, coreMax = 10;
    std::size_t spanMin = 2, spanMax = 6;
    std::size_t centerSpanMax = 2;
    double titleBias = 0.7;
    std::string idPrefix = "synth";
    bool noTitles = false;
    bool lenient = false;
    std::uint64_t seed = 12345;
    std::string out = "out";
};

int runSynth(const SynthCliOpts& o) {
    const auto lexicon = loadVadLexicon(o.lexicon, o.lenient);

    SynthConfig cfg;
    cfg.numRecords = o.records;
    cfg.coreMinLen = o.coreMin;
    cfg.coreMaxLen = o.coreMax;
    cfg.spanMinLen = o.spanMin;
    cfg.spanMaxLen = o.spanMax;
    cfg.centerSpanMaxLen = o.centerSpanMax;
    cfg.emitTitles = !o.noTitles;
    cfg.titleBiasProb = o.titleBias;
    cfg.idPrefix = o.idPrefix;

    Rng rng(o.seed, "synth");
    const auto corpus = generateSyntheticCorpus(cfg, lexicon, rng);
    const std::string corpusPath = joinPath(o.out, "corpus.jsonl");
    writeTextFile(corpusPath, datasetToJsonl(corpus));

    const nlohmann::json resolved = {{"lexicon", o.lexicon},
                                     {"records", cfg.numRecords},
                                     {"core_min", cfg.coreMinLen},
                                     {"core_max", cfg.coreMaxLen},
                                     {"span_min", cfg.spanMinLen},
                                     {"span_max", cfg.spanMaxLen},
                                     {"center_span_max", cfg.centerSpanMaxLen},
                                     {"titles", cfg.emitTitles},
                                     {"title_bias", cfg.titleBiasProb},
                                     {"id_prefix", cfg.idPrefix}};
    RunManifest manifest;
    manifest.subcommand = "synth";
    manifest.resolvedConfig = resolved;
    manifest.seed = o.seed;
    manifest.inputs = {{o.lexicon, fileDigest(o.lexicon)}};
    manifest.outputs = {{corpusPath, fileDigest(corpusPath)}};
    writeRunManifest(o.out, manifest);

    std::cout << "synthesized " << corpus.size() << " records -> " << corpusPath << '\n';
    return 0;
}

int runTrain(const CLI::App* cmd, const TrainCliOpts& o) {
    const TrainConfig cfg = resolveTrainConfig(cmd, o);
    const auto dataset = loadDataset(o.dataset);
    const auto lexicon = loadVadLexicon(o.lexicon, o.lenient);

    const TrainResult res = train(dataset, cfg, lexicon);

    const std::string ckptPath = joinPath(o.out, "checkpoint.bin");
    saveCheckpoint(ckptPath, res.checkpoint);

    const nlohmann::json resolved = cfg.toJson();
    nlohmann::json historyJson;
    historyJson["history"] = res.history.toJson();
    historyJson["train_records"] = res.trainRecords;
    historyJson["val_records"] = res.valRecords;
    historyJson["test_records"] = res.testRecords;
    historyJson["polar_pairs_used"] = res.polarPairsUsed;
    historyJson["meta"] = artifactMeta("train", resolved, cfg.seed);
    const std::string historyPath = joinPath(o.out, "history.json");
    writeTextFile(historyPath, historyJson.dump(2) + "\n");

    RunManifest manifest;
    manifest.subcommand = "train";
    manifest.resolvedConfig = resolved;
    manifest.seed = cfg.seed;
    manifest.inputs = {{o.dataset, fileDigest(o.dataset)}, {o.lexicon, fileDigest(o.lexicon)}};
    manifest.outputs = {{ckptPath, fileDigest(ckptPath)}, {historyPath, fileDigest(historyPath)}};
    writeRunManifest(o.out, manifest);

    const auto& best = res.history.epochs[res.history.bestEpoch];
    std::cout << "trained " << res.history.epochs.size() << " epochs on " << res.trainRecords
              << " records (best epoch " << res.history.bestEpoch + 1 << ", val loss "
              << best.valMds << ", polar pairs " << res.polarPairsUsed << ")\n";
    std::cout << "checkpoint -> " << ckptPath << '\n';
    return 0;
}

struct GenerateCliOpts {
    std::string checkpoint;
    std::string dataset;
    std::string split = "all";
    std::string out = "out";
    std::uint64_t seed = 12345; // recorded; generation is checkpoint-seeded
};

int runGenerate(const GenerateCliOpts& o) {
    const Checkpoint ckpt = loadCheckpoint(o.checkpoint);
    const auto records = loadSplit(o.dataset, o.split);
    const auto texts = generateSummaries(ckpt, records);

    const std::string genPath = joinPath(o.out, "generations.jsonl");
    saveGenerations(genPath, records, texts);

    const nlohmann::json resolved = {{"checkpoint", o.checkpoint},
                                     {"dataset", o.dataset},
                                     {"split", o.split}};
    RunManifest manifest;
    manifest.subcommand = "generate";
    manifest.resolvedConfig = resolved;
    manifest.seed = ckpt.masterSeed;
    manifest.inputs = {{o.checkpoint, fileDigest(o.checkpoint)},
                       {o.dataset, fileDigest(o.dataset)}};
    manifest.outputs = {{genPath, fileDigest(genPath)}};
    writeRunManifest(o.out, manifest);

    std::cout << "decoded " << records.size() << " records -> " << genPath << '\n';
    return 0;
}

struct EvalCliOpts {
    std::string generations;
    std::string dataset;
    std::string lexicon;
    std::string split = "all";
    std::string system = "system";
    bool useTitles = false;
    bool lenient = false;
    std::uint64_t seed = 12345;
    std::string out = "out";
};

int runEval(const EvalCliOpts& o) {
    const auto gens = loadGenerations(o.generations);
    const auto records = loadSplit(o.dataset, o.split);
    const auto lexicon = loadVadLexicon(o.lexicon, o.lenient);

    if (gens.size() != records.size()) {
        throw DataError("eval: " + std::to_string(gens.size()) + " generations vs "
                        + std::to_string(records.size()) + " records in split '" + o.split + "'");
    }
    std::unordered_map<std::string, std::string> byId;
    for (const auto& [id, text] : gens) byId[id] = text;
    std::vector<std::string> hyps, refs;
    hyps.reserve(records.size());
    refs.reserve(records.size());
    for (const auto& rec : records) {
        const auto it = byId.find(rec.recordId);
        if (it == byId.end()) {
            throw DataError("eval: no generation for record " + rec.recordId);
        }
        hyps.push_back(it->second);
        refs.push_back(referenceText(rec.target, o.useTitles));
    }

    const MetricsReport report = evaluateSystem(o.system, hyps, refs, lexicon);
    const nlohmann::json resolved = {{"generations", o.generations},
                                     {"dataset", o.dataset},
                                     {"lexicon", o.lexicon},
                                     {"split", o.split},
                                     {"system", o.system},
                                     {"use_titles", o.useTitles}};
    nlohmann::json reportJson = report.toJson();
    reportJson["meta"] = artifactMeta("eval", resolved, o.seed);
    const std::string reportPath = joinPath(o.out, "report.json");
    writeTextFile(reportPath, reportJson.dump(2) + "\n");

    RunManifest manifest;
    manifest.subcommand = "eval";
    manifest.resolvedConfig = resolved;
    manifest.seed = o.seed;
    manifest.inputs = {{o.generations, fileDigest(o.generations)},
                       {o.dataset, fileDigest(o.dataset)},
                       {o.lexicon, fileDigest(o.lexicon)}};
    manifest.outputs = {{reportPath, fileDigest(reportPath)}};
    writeRunManifest(o.out, manifest);

    std::cout << "system " << report.system << " on " << report.numExamples << " examples:\n"
              << "  arousal_sum " << report.arousal.arousalSum << " (pos "
              << report.arousal.arousalPos << ", neg " << report.arousal.arousalNeg << ")\n"
              << "  bleu " << report.bleu << ", token_f1 " << report.tokenF1 << '\n'
              << "report -> " << reportPath << '\n';
    return 0;
}

std::vector<double> parseLambdaList(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            const double v = std::stod(item, &pos);
            if (pos != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError("--lambdas: bad value '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("--lambdas: empty list");
    return out;
}

int runSweep(const CLI::App* cmd, const TrainCliOpts& o, const std::string& lambdasCsv) {
    TrainConfig base = resolveTrainConfig(cmd, o);
    const auto lambdas = parseLambdaList(lambdasCsv);
    const auto dataset = loadDataset(o.dataset);
    const auto lexicon = loadVadLexicon(o.lexicon, o.lenient);

    const SweepReport report = lambdaSweep(dataset, base, lambdas, lexicon);

    nlohmann::json resolved = base.toJson();
    resolved["lambdas"] = lambdas;
    nlohmann::json reportJson = report.toJson();
    reportJson["meta"] = artifactMeta("sweep", resolved, base.seed);

    const std::string jsonPath = joinPath(o.out, "sweep.json");
    const std::string csvPath = joinPath(o.out, "sweep.csv");
    const std::string textPath = joinPath(o.out, "sweep.txt");
    writeTextFile(jsonPath, reportJson.dump(2) + "\n");
    writeTextFile(csvPath, report.toCsv());
    writeTextFile(textPath, report.toText());

    RunManifest manifest;
    manifest.subcommand = "sweep";
    manifest.resolvedConfig = resolved;
    manifest.seed = base.seed;
    manifest.inputs = {{o.dataset, fileDigest(o.dataset)}, {o.lexicon, fileDigest(o.lexicon)}};
    manifest.outputs = {{jsonPath, fileDigest(jsonPath)},
                        {csvPath, fileDigest(csvPath)},
                        {textPath, fileDigest(textPath)}};
    writeRunManifest(o.out, manifest);

    std::cout << report.toText() << "reports -> " << jsonPath << '\n';
    return 0;
}

int runAblate(const CLI::App* cmd, const TrainCliOpts& o) {
    TrainConfig base = resolveTrainConfig(cmd, o);
    const auto dataset = loadDataset(o.dataset);
    const auto lexicon = loadVadLexicon(o.lexicon, o.lenient);

    const AblationReport report = ablateDirection(dataset, base, lexicon);

    const nlohmann::json resolved = base.toJson();
    nlohmann::json reportJson = report.toJson();
    reportJson["meta"] = artifactMeta("ablate", resolved, base.seed);

    const std::string jsonPath = joinPath(o.out, "ablation.json");
    const std::string textPath = joinPath(o.out, "ablation.txt");
    writeTextFile(jsonPath, reportJson.dump(2) + "\n");
    writeTextFile(textPath, report.toText());

    RunManifest manifest;
    manifest.subcommand = "ablate";
    manifest.resolvedConfig = resolved;
    manifest.seed = base.seed;
    manifest.inputs = {{o.dataset, fileDigest(o.dataset)}, {o.lexicon, fileDigest(o.lexicon)}};
    manifest.outputs = {{jsonPath, fileDigest(jsonPath)}, {textPath, fileDigest(textPath)}};
    writeRunManifest(o.out, manifest);

    std::cout << report.toText() << "reports -> " << jsonPath << '\n';
    return 0;
}

struct AbTestCliOpts {
    std::size_t wins = 0;
    std::size_t losses = 0;
    std::size_t draws = 0;
    std::string policy = "exclude";
    std::uint64_t seed = 12345;
    std::string out = "out";
};

int runAbTest(const AbTestCliOpts& o) {
    DrawPolicy policy;
    if (o.policy == "exclude") policy = DrawPolicy::Exclude;
    else if (o.policy == "split") policy = DrawPolicy::Split;
    else throw ConfigError("--policy must be exclude or split; got '" + o.policy + "'");

    const AbTestResult res = binomialAbTest(o.wins, o.losses, o.draws, policy);
    std::cout << "n=" << res.nEffective << " k=" << res.wins << " p=" << res.pValue
              << " (exact " << res.exactFraction << ")\n";

    const nlohmann::json resolved = {{"wins", o.wins},
                                     {"losses", o.losses},
                                     {"draws", o.draws},
                                     {"policy", o.policy}};
    nlohmann::json reportJson = res.toJson();
    reportJson["meta"] = artifactMeta("abtest", resolved, o.seed);
    const std::string reportPath = joinPath(o.out, "abtest.json");
    writeTextFile(reportPath, reportJson.dump(2) + "\n");

    RunManifest manifest;
    manifest.subcommand = "abtest";
    manifest.resolvedConfig = resolved;
    manifest.seed = o.seed;
    manifest.outputs = {{reportPath, fileDigest(reportPath)}};
    writeRunManifest(o.out, manifest);
    return 0;
}

struct DemoCliOpts {
    std::string lexicon;
    std::size_t records = 500;
    double lambda = 0.7;
    bool lenient = false;
    std::uint64_t seed = 12345;
    std::string out = "out";
};

int runDemo(const DemoCliOpts& o) {
    const auto lexicon = loadVadLexicon(o.lexicon, o.lenient);

    SynthConfig synthCfg;
    synthCfg.numRecords = o.records;
    Rng synthRng(o.seed, "synth");
    const auto corpus = generateSyntheticCorpus(synthCfg, lexicon, synthRng);
    const std::string corpusPath = joinPath(o.out, "corpus.jsonl");
    writeTextFile(corpusPath, datasetToJsonl(corpus));
    std::cout << "synthesized " << corpus.size() << " records\n";

    TrainConfig baseCfg;
    baseCfg.seed = o.seed;
    baseCfg.useTitles = true;

    TrainConfig mdsCfg = baseCfg;
    TrainConfig polarCfg = baseCfg;
    polarCfg.lambda = o.lambda;
    polarCfg.selection = SelectionConfig{SelectionVariant::LrInfo, 0.5};

    std::cout << "training summarization-only baseline...\n";
    const TrainResult mdsRes = train(corpus, mdsCfg, lexicon);
    std::cout << "training with polarity minimization (LR-Info, lambda " << o.lambda << ")...\n";
    const TrainResult polarRes = train(corpus, polarCfg, lexicon);

    const auto testRecs = filterSplit(corpus, Split::Test);
    const MetricsReport a = evaluateModel(mdsRes.checkpoint, testRecs, lexicon, "mds-only");
    const MetricsReport b = evaluateModel(polarRes.checkpoint, testRecs, lexicon, "polar-min");

    std::cout << '\n' << renderComparisonTable(a, b) << '\n';

    nlohmann::json resolved = {{"lexicon", o.lexicon},
                               {"records", o.records},
                               {"lambda", o.lambda},
                               {"baseline", mdsCfg.toJson()},
                               {"polarity_minimized", polarCfg.toJson()}};
    nlohmann::json reportJson;
    reportJson["baseline"] = a.toJson();
    reportJson["polarity_minimized"] = b.toJson();
    reportJson["comparison"] = compareSystems(a, b);
    reportJson["meta"] = artifactMeta("demo", resolved, o.seed);
    const std::string reportPath = joinPath(o.out, "demo_report.json");
    writeTextFile(reportPath, reportJson.dump(2) + "\n");

    RunManifest manifest;
    manifest.subcommand = "demo";
    manifest.resolvedConfig = resolved;
    manifest.seed = o.seed;
    manifest.inputs = {{o.lexicon, fileDigest(o.lexicon)}};
    manifest.outputs = {{corpusPath, fileDigest(corpusPath)},
                        {reportPath, fileDigest(reportPath)}};
    writeRunManifest(o.out, manifest);

    std::cout << "demo report -> " << reportPath << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polarity-minimization training toolkit for neutral multi-article summarization"};
    app.require_subcommand(1);

    TrainCliOpts scoreOpts;
    auto* score = app.add_subcommand("score", "Arousal framing-bias report for a dataset");
    score->add_option("--dataset", scoreOpts.dataset, "Dataset JSONL path")->required();
    score->add_option("--lexicon", scoreOpts.lexicon, "VAD lexicon TSV path")->required();
    score->add_flag("--lenient", scoreOpts.lenient, "Skip malformed lexicon rows");
    score->add_option("--seed", scoreOpts.seed, "Recorded in the manifest");
    score->add_option("--out", scoreOpts.out, "Output directory");

    TrainCliOpts selOpts;
    auto* sel = app.add_subcommand("select-pairs", "Build a polar pair manifest");
    sel->add_option("--dataset", selOpts.dataset, "Dataset JSONL path")->required();
    sel->add_option("--lexicon", selOpts.lexicon, "VAD lexicon TSV path")->required();
    sel->add_option("--variant", selOpts.variant, "Selection variant")->required();
    sel->add_option("--fraction", selOpts.fraction, "Fraction kept, in (0,1]");
    sel->add_flag("--lenient", selOpts.lenient, "Skip malformed lexicon rows");
    sel->add_option("--seed", selOpts.seed, "Recorded in the manifest");
    sel->add_option("--out", selOpts.out, "Output directory");

    SynthCliOpts synthOpts;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic polarized corpus");
    synth->add_option("--lexicon", synthOpts.lexicon, "VAD lexicon TSV path")->required();
    synth->add_option("--records", synthOpts.records, "Number of records");
    synth->add_option("--core-min", synthOpts.coreMin, "Min neutral core length");
    synth->add_option("--core-max", synthOpts.coreMax, "Max neutral core length");
    synth->add_option("--span-min", synthOpts.spanMin, "Min biased span length");
    synth->add_option("--span-max", synthOpts.spanMax, "Max biased span length");
    synth->add_option("--center-span-max", synthOpts.centerSpanMax, "Max center span length");
    synth->add_option("--title-bias", synthOpts.titleBias,
                      "Fraction of reference titles echoing a loaded span word");
    synth->add_option("--id-prefix", synthOpts.idPrefix, "Record id prefix");
    synth->add_flag("--no-titles", synthOpts.noTitles, "Omit article titles");
    synth->add_flag("--lenient", synthOpts.lenient, "Skip malformed lexicon rows");
    synth->add_option("--seed", synthOpts.seed, "Master seed");
    synth->add_option("--out", synthOpts.out, "Output directory");

    TrainCliOpts trainOpts;
    auto* trainCmd = app.add_subcommand("train", "Train a summarization model");
    addCommonTrainOptions(trainCmd, trainOpts, true);

    GenerateCliOpts genOpts;
    auto* gen = app.add_subcommand("generate", "Greedy-decode summaries from a checkpoint");
    gen->add_option("--checkpoint", genOpts.checkpoint, "Checkpoint path")->required();
    gen->add_option("--dataset", genOpts.dataset, "Dataset JSONL path")->required();
    gen->add_option("--split", genOpts.split, "train|val|test|all");
    gen->add_option("--out", genOpts.out, "Output directory");

    EvalCliOpts evalOpts;
    auto* evalCmd = app.add_subcommand("eval", "Score generations against targets");
    evalCmd->add_option("--generations", evalOpts.generations, "Generations JSONL")->required();
    evalCmd->add_option("--dataset", evalOpts.dataset, "Dataset JSONL path")->required();
    evalCmd->add_option("--lexicon", evalOpts.lexicon, "VAD lexicon TSV path")->required();
    evalCmd->add_option("--split", evalOpts.split, "train|val|test|all");
    evalCmd->add_option("--system", evalOpts.system, "System name in the report");
    evalCmd->add_flag("--use-titles", evalOpts.useTitles,
                      "References include title words (match a titled training run)");
    evalCmd->add_flag("--lenient", evalOpts.lenient, "Skip malformed lexicon rows");
    evalCmd->add_option("--seed", evalOpts.seed, "Recorded in the manifest");
    evalCmd->add_option("--out", evalOpts.out, "Output directory");

    TrainCliOpts sweepOpts;
    std::string lambdasCsv = "0,0.3,0.7,1,1.5";
    auto* sweep = app.add_subcommand("sweep", "Train across a list of lambda values");
    addCommonTrainOptions(sweep, sweepOpts, true);
    sweep->add_option("--lambdas", lambdasCsv, "Comma-separated lambda values");

    TrainCliOpts ablateOpts;
    auto* ablate = app.add_subcommand("ablate", "Direction ablation (both / -RtoL / -LtoR)");
    addCommonTrainOptions(ablate, ablateOpts, true);

    AbTestCliOpts abOpts;
    auto* abtest = app.add_subcommand("abtest", "Exact binomial sign test on A/B judgments");
    abtest->add_option("--wins", abOpts.wins, "Wins for system A")->required();
    abtest->add_option("--losses", abOpts.losses, "Losses for system A")->required();
    abtest->add_option("--draws", abOpts.draws, "Draws");
    abtest->add_option("--policy", abOpts.policy, "Draw policy: exclude|split");
    abtest->add_option("--seed", abOpts.seed, "Recorded in the manifest");
    abtest->add_option("--out", abOpts.out, "Output directory");

    DemoCliOpts demoOpts;
    auto* demo = app.add_subcommand("demo", "End-to-end synthetic run: baseline vs polarity-minimized");
    demo->add_option("--lexicon", demoOpts.lexicon, "VAD lexicon TSV path")->required();
    demo->add_option("--records", demoOpts.records, "Synthetic corpus size");
    demo->add_option("--lambda", demoOpts.lambda, "Polarity loss weight for the treated system");
    demo->add_flag("--lenient", demoOpts.lenient, "Skip malformed lexicon rows");
    demo->add_option("--seed", demoOpts.seed, "Master seed");
    demo->add_option("--out", demoOpts.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage problems are exit 1; --help is success
    }

    try {
        if (score->parsed()) return runScore(scoreOpts);
        if (sel->parsed()) return runSelectPairs(sel, selOpts);
        if (synth->parsed()) return runSynth(synthOpts);
        if (trainCmd->parsed()) return runTrain(trainCmd, trainOpts);
        if (gen->parsed()) return runGenerate(genOpts);
        if (evalCmd->parsed()) return runEval(evalOpts);
        if (sweep->parsed()) return runSweep(sweep, sweepOpts, lambdasCsv);
        if (ablate->parsed()) return runAblate(ablate, ablateOpts);
        if (abtest->parsed()) return runAbTest(abOpts);
        if (demo->parsed()) return runDemo(demoOpts);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
