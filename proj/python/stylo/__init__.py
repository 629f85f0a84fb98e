"""Authorship attribution, sampled evaluation and round-trip translation."""

from ._stylo import (
    Corpus,
    DiffReport,
    TrainedModel,
    __version__,
    chunk_background,
    cli_run,
    confidence_interval,
    corpus_stats,
    crossval,
    extract,
    feature_names,
    fit_model,
    inspect_round_trip,
    load_corpus,
    load_model,
    pos_tag,
    risk_report,
    round_trip,
    run_experiment,
    save_model,
    split_sentences,
    tokenize,
)

__all__ = [
    "Corpus",
    "DiffReport",
    "TrainedModel",
    "__version__",
    "chunk_background",
    "cli_run",
    "confidence_interval",
    "corpus_stats",
    "crossval",
    "extract",
    "feature_names",
    "fit_model",
    "inspect_round_trip",
    "load_corpus",
    "load_model",
    "pos_tag",
    "risk_report",
    "round_trip",
    "run_experiment",
    "save_model",
    "split_sentences",
    "tokenize",
]
