#include "polarmin/batching.hpp"
#include "polarmin/bias_metrics.hpp"
#include "polarmin/dataset.hpp"
#include "polarmin/errors.hpp"
#include "polarmin/evaluation.hpp"
#include "polarmin/lexicon.hpp"
#include "polarmin/model.hpp"
#include "polarmin/pair_selection.hpp"
#include "polarmin/rng.hpp"
#include "polarmin/synth.hpp"
#include "polarmin/trainer.hpp"
#include "polarmin/vocab.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace polarmin;
using nlohmann::json;

namespace {

py::object pyFromJson(const json& j) {
    switch (j.type()) {
    case json::value_t::null: return py::none();
    case json::value_t::boolean: return py::bool_(j.get<bool>());
    case json::value_t::number_integer: return py::int_(j.get<long long>());
    case json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
    case json::value_t::number_float: return py::float_(j.get<double>());
    case json::value_t::string: return py::str(j.get<std::string>());
    case json::value_t::array: {
        py::list out;
        for (const auto& item : j) out.append(pyFromJson(item));
        return out;
    }
    case json::value_t::object: {
        py::dict out;
        for (const auto& [key, value] : j.items()) out[py::str(key)] = pyFromJson(value);
        return out;
    }
    default: return py::none();
    }
}

json jsonFromPy(py::handle obj) {
    if (obj.is_none()) return nullptr;
    if (py::isinstance<py::bool_>(obj)) return obj.cast<bool>();
    if (py::isinstance<py::int_>(obj)) return obj.cast<long long>();
    if (py::isinstance<py::float_>(obj)) return obj.cast<double>();
    if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
    if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj)) {
        json arr = json::array();
        for (py::handle item : obj) arr.push_back(jsonFromPy(item));
        return arr;
    }
    if (py::isinstance<py::dict>(obj)) {
        json o = json::object();
        for (auto item : obj.cast<py::dict>()) {
            o[item.first.cast<std::string>()] = jsonFromPy(item.second);
        }
        return o;
    }
    throw ConfigError("unsupported Python value in JSON conversion");
}

std::vector<PolarizedSet> recordsFromPy(py::list records) {
    std::ostringstream lines;
    for (py::handle rec : records) lines << jsonFromPy(rec).dump() << '\n';
    return parseDatasetJsonl(lines.str());
}

py::list recordsToPy(const std::vector<PolarizedSet>& records) {
    std::istringstream in(datasetToJsonl(records));
    py::list out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.append(pyFromJson(json::parse(line)));
    }
    return out;
}

py::list pairsToPy(const std::vector<PolarPair>& pairs) {
    std::istringstream in(pairsToJsonl(pairs));
    py::list out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.append(pyFromJson(json::parse(line)));
    }
    return out;
}

TokenizerConfig tokConfigOf(bool lowercase, bool stripPunct, bool protectMarkers) {
    TokenizerConfig c;
    c.lowercase = lowercase;
    c.stripPunctuation = stripPunct;
    c.protectMarkers = protectMarkers;
    return c;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Polarity-minimization summarization toolkit (native core)";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

    py::class_<VadLexicon>(m, "VadLexicon")
        .def(py::init([](const std::string& path, bool lenient) {
                 return loadVadLexicon(path, lenient);
             }),
             py::arg("path"), py::arg("lenient") = false)
        .def("__len__", &VadLexicon::size)
        .def(
            "lookup",
            [](const VadLexicon& lex, const std::string& token) -> py::object {
                const auto entry = lex.lookup(token);
                if (!entry) return py::none();
                return py::make_tuple(entry->valence, entry->arousal, entry->dominance);
            },
            py::arg("token"), "Returns (valence, arousal, dominance) or None")
        .def_property_readonly("duplicate_count", &VadLexicon::duplicateCount)
        .def_property_readonly("skipped_row_count", &VadLexicon::skippedRowCount);

    m.def(
        "tokenize",
        [](const std::string& text, bool lowercase, bool stripPunct, bool protectMarkers) {
            return tokenize(text, tokConfigOf(lowercase, stripPunct, protectMarkers));
        },
        py::arg("text"), py::arg("lowercase") = true, py::arg("strip_punctuation") = true,
        py::arg("protect_markers") = true);

    m.def(
        "arousal_scores",
        [](const std::string& text, const VadLexicon& lexicon, double posValenceMin,
           double negValenceMax, double arousalMin, bool perToken) {
            BiasThresholds th;
            th.posValenceMin = posValenceMin;
            th.negValenceMax = negValenceMax;
            th.arousalMin = arousalMin;
            return pyFromJson(arousalScores(text, lexicon, th, {}, perToken).toJson());
        },
        py::arg("text"), py::arg("lexicon"), py::arg("pos_valence_min") = 0.65,
        py::arg("neg_valence_max") = 0.35, py::arg("arousal_min") = 0.0,
        py::arg("per_token_normalize") = false);

    m.def(
        "unique_num",
        [](const std::string& a, const std::string& b) { return uniqueNum(a, b); },
        py::arg("a"), py::arg("b"),
        "Size of the symmetric difference of the two texts' token sets");

    m.def(
        "select_pairs",
        [](py::list records, const std::string& variant, double fraction,
           const VadLexicon& lexicon) {
            SelectionConfig cfg;
            cfg.variant = parseVariantFlag(variant);
            cfg.fraction = fraction;
            return pairsToPy(selectPairs(recordsFromPy(records), cfg, lexicon));
        },
        py::arg("records"), py::arg("variant"), py::arg("fraction"), py::arg("lexicon"));

    m.def(
        "synthesize_corpus",
        [](const VadLexicon& lexicon, std::size_t numRecords, std::uint64_t seed, bool titles,
           double titleBias) {
            SynthConfig cfg;
            cfg.numRecords = numRecords;
            cfg.emitTitles = titles;
            cfg.titleBiasProb = titleBias;
            Rng rng(seed, "synth");
            return recordsToPy(generateSyntheticCorpus(cfg, lexicon, rng));
        },
        py::arg("lexicon"), py::arg("num_records") = 100, py::arg("seed") = 12345,
        py::arg("titles") = true, py::arg("title_bias") = 0.7);

    m.def(
        "load_dataset",
        [](const std::string& path) { return recordsToPy(loadDataset(path)); },
        py::arg("path"));

    m.def(
        "split_of",
        [](const std::string& recordId) {
            switch (splitOf(recordId)) {
            case Split::Train: return "train";
            case Split::Validation: return "val";
            case Split::Test: return "test";
            }
            return "train";
        },
        py::arg("record_id"));

    m.def(
        "corpus_bleu",
        [](const std::vector<std::string>& hyps, const std::vector<std::string>& refs) {
            return corpusBleu(hyps, refs);
        },
        py::arg("hypotheses"), py::arg("references"));

    m.def(
        "token_f1",
        [](const std::string& hyp, const std::string& ref) { return tokenF1(hyp, ref); },
        py::arg("hypothesis"), py::arg("reference"));

    m.def(
        "evaluate_system",
        [](const std::string& name, const std::vector<std::string>& hyps,
           const std::vector<std::string>& refs, const VadLexicon& lexicon) {
            return pyFromJson(evaluateSystem(name, hyps, refs, lexicon).toJson());
        },
        py::arg("name"), py::arg("hypotheses"), py::arg("references"), py::arg("lexicon"));

    m.def(
        "binomial_ab_test",
        [](std::size_t wins, std::size_t losses, std::size_t draws, const std::string& policy) {
            DrawPolicy p;
            if (policy == "exclude") p = DrawPolicy::Exclude;
            else if (policy == "split") p = DrawPolicy::Split;
            else throw ConfigError("policy must be 'exclude' or 'split'");
            return pyFromJson(binomialAbTest(wins, losses, draws, p).toJson());
        },
        py::arg("wins"), py::arg("losses"), py::arg("draws") = 0,
        py::arg("policy") = "exclude");

    m.def(
        "train",
        [](py::list records, const VadLexicon& lexicon, py::dict config,
           const std::optional<std::string>& checkpointPath) {
            const TrainConfig cfg = TrainConfig::fromJson(jsonFromPy(config));
            const TrainResult res = train(recordsFromPy(records), cfg, lexicon);
            if (checkpointPath) saveCheckpoint(*checkpointPath, res.checkpoint);
            json out;
            out["history"] = res.history.toJson();
            out["train_records"] = res.trainRecords;
            out["val_records"] = res.valRecords;
            out["test_records"] = res.testRecords;
            out["polar_pairs_used"] = res.polarPairsUsed;
            return pyFromJson(out);
        },
        py::arg("records"), py::arg("lexicon"), py::arg("config") = py::dict(),
        py::arg("checkpoint_path") = std::nullopt,
        "Train on the records (hash-split internally); optionally save the best checkpoint");

    m.def(
        "generate_summaries",
        [](const std::string& checkpointPath, py::list records) {
            const Checkpoint ckpt = loadCheckpoint(checkpointPath);
            return generateSummaries(ckpt, recordsFromPy(records));
        },
        py::arg("checkpoint_path"), py::arg("records"));

    m.def(
        "evaluate_checkpoint",
        [](const std::string& checkpointPath, py::list records, const VadLexicon& lexicon,
           const std::string& name) {
            const Checkpoint ckpt = loadCheckpoint(checkpointPath);
            return pyFromJson(evaluateModel(ckpt, recordsFromPy(records), lexicon, name).toJson());
        },
        py::arg("checkpoint_path"), py::arg("records"), py::arg("lexicon"),
        py::arg("name") = "system");
}
