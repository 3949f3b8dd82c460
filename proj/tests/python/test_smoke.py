"""End-to-end smoke tests for the Python surface of the native core."""

import math
from pathlib import Path

import pytest

import polarmin

REPO_ROOT = Path(__file__).resolve().parents[2]
LEXICON_PATH = str(REPO_ROOT / "data" / "demo_vad.tsv")


@pytest.fixture(scope="module")
def lexicon():
    return polarmin.VadLexicon(LEXICON_PATH)


def test_tokenize_lowercases_and_protects_markers():
    toks = polarmin.tokenize("The <title> Riot! <article> woke up.")
    assert toks == ["the", "<title>", "riot", "<article>", "woke", "up"]


def test_lexicon_lookup_is_case_folded(lexicon):
    assert len(lexicon) > 0
    hit = lexicon.lookup("RIOT")
    assert hit is not None
    valence, arousal, dominance = hit
    assert 0.0 <= valence <= 1.0
    assert 0.0 <= arousal <= 1.0
    assert 0.0 <= dominance <= 1.0
    assert lexicon.lookup("not-a-lexicon-word") is None


def test_arousal_scores_buckets_negative_words(lexicon):
    report = polarmin.arousal_scores("riot riot ballot", lexicon)
    assert report["arousal_neg"] > 0.0
    assert report["arousal_pos"] == 0.0
    assert report["arousal_sum"] == report["arousal_neg"] + report["arousal_pos"]
    assert report["total_tokens"] == 3


def test_unique_num_counts_symmetric_difference():
    assert polarmin.unique_num("a b c", "b c d") == 2
    assert polarmin.unique_num("same text", "same text") == 0


def test_synthesize_corpus_shape_and_determinism(lexicon):
    records = polarmin.synthesize_corpus(lexicon, num_records=12, seed=5)
    assert len(records) == 12
    for rec in records:
        assert rec["left"]["text"].startswith(rec["target"]["text"])
        assert rec["right"]["text"].startswith(rec["target"]["text"])
        assert rec["left"]["title"]
    again = polarmin.synthesize_corpus(lexicon, num_records=12, seed=5)
    assert records == again
    bare = polarmin.synthesize_corpus(lexicon, num_records=3, seed=5, titles=False)
    assert all(r["target"].get("title", "") == "" for r in bare)


def test_select_pairs_counts_and_sides(lexicon):
    records = polarmin.synthesize_corpus(lexicon, num_records=10, seed=5)
    pairs = polarmin.select_pairs(records, "lr-info", 0.5, lexicon)
    assert len(pairs) == 2 * math.ceil(0.5 * len(records))
    for pair in pairs:
        assert {pair["source_ideology"], pair["target_ideology"]} == {"L", "R"}


def test_split_of_is_deterministic():
    assert polarmin.split_of("some-record") in ("train", "val", "test")
    assert polarmin.split_of("some-record") == polarmin.split_of("some-record")


def test_metric_goldens():
    hyps = ["the cat sat on the mat"]
    assert polarmin.corpus_bleu(hyps, hyps) == 1.0
    assert polarmin.token_f1("a a a", "a") == 0.5
    assert polarmin.token_f1("x y", "y x") == polarmin.token_f1("y x", "x y")


def test_binomial_ab_test_golden():
    report = polarmin.binomial_ab_test(16, 7, 7, policy="exclude")
    assert report["n_effective"] == 23
    assert report["p_value"] == 390656 / 8388608
    assert report["exact_fraction"] == "390656/8388608"


def test_train_generate_evaluate_roundtrip(lexicon, tmp_path):
    records = polarmin.synthesize_corpus(lexicon, num_records=40, seed=9)
    config = {
        "epochs": 1,
        "patience": 0,
        "batch_size": 8,
        "embed_dim": 8,
        "hidden_dim": 12,
        "max_in_len": 96,
        "max_out_len": 24,
        "seed": 11,
    }
    ckpt = str(tmp_path / "smoke.ckpt")
    result = polarmin.train(records, lexicon, config, ckpt)
    assert result["train_records"] + result["val_records"] + result["test_records"] == 40
    assert result["polar_pairs_used"] == 0
    assert len(result["history"]["epochs"]) == 1
    assert math.isfinite(result["history"]["epochs"][0]["train_mds"])

    summaries = polarmin.generate_summaries(ckpt, records[:4])
    assert len(summaries) == 4
    assert all(isinstance(s, str) for s in summaries)

    report = polarmin.evaluate_checkpoint(ckpt, records[:4], lexicon, "smoke")
    assert report["system"] == "smoke"
    assert 0.0 <= report["bleu"] <= 1.0
    assert 0.0 <= report["token_f1"] <= 1.0


def test_exception_mapping(lexicon):
    with pytest.raises(ValueError):
        polarmin.train([], lexicon, {"epochs": 0})
    with pytest.raises(RuntimeError):
        polarmin.VadLexicon(str(REPO_ROOT / "data" / "no-such-lexicon.tsv"))
    with pytest.raises(RuntimeError):
        polarmin.binomial_ab_test(0, 0, 0)
