"""Polarity-minimization training toolkit for neutral multi-article summarization.

Thin Python surface over the native core: VAD-lexicon scoring, polar pair
selection, synthetic corpus generation, training, decoding and evaluation.
"""

from polarmin._core import (
    ConfigError,
    DataError,
    VadLexicon,
    arousal_scores,
    binomial_ab_test,
    corpus_bleu,
    evaluate_checkpoint,
    evaluate_system,
    generate_summaries,
    load_dataset,
    select_pairs,
    split_of,
    synthesize_corpus,
    token_f1,
    tokenize,
    train,
    unique_num,
)

__all__ = [
    "ConfigError",
    "DataError",
    "VadLexicon",
    "arousal_scores",
    "binomial_ab_test",
    "corpus_bleu",
    "evaluate_checkpoint",
    "evaluate_system",
    "generate_summaries",
    "load_dataset",
    "select_pairs",
    "split_of",
    "synthesize_corpus",
    "token_f1",
    "tokenize",
    "train",
    "unique_num",
]
