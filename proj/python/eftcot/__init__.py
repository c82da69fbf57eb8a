"""Python access to the eftcot native core."""

import json as _json

from ._core import (
    ConfigError,
    DegenerateError,
    EftcotError,
    EmptyInputError,
    FormatError,
    IoError,
    bleu,
    distinct,
    meteor,
    parse_judge_score,
    report,
    round2,
    rouge_l,
    tokenize,
    train_size,
    validate_trace_file,
    win_rate,
)
from . import _core

__all__ = [
    "ConfigError", "DegenerateError", "EftcotError", "EmptyInputError", "FormatError", "IoError",
    "bleu", "build_dataset", "distinct", "eval_auto", "eval_judge", "evaluate_pairs", "meteor",
    "parse_judge_score", "report", "round2", "rouge_l", "synthesize", "tokenize", "train_size",
    "validate_trace", "validate_trace_file", "verify_anchors", "wilcoxon", "win_rate",
]


def _as_text(trace):
    return trace if isinstance(trace, str) else _json.dumps(trace)


def _result(pair):
    code, manifest = pair
    return code, _json.loads(manifest)


def evaluate_pairs(pairs, toy_dimension=0, mode="character"):
    """Corpus metrics for (candidate, reference) pairs. BERTScore uses the toy embedder when toy_dimension > 0."""
    return _json.loads(_core.evaluate_pairs_json(list(pairs), toy_dimension, mode))


def wilcoxon(a, b, alpha=0.05, exact_cutoff=25):
    """One-sided signed-rank test of a > b."""
    return _json.loads(_core.wilcoxon_json(list(a), list(b), alpha, exact_cutoff))


def validate_trace(trace, need_prefix="I need"):
    """List of (stage, rule, detail) violations for a trace or triplet (dict or JSON text)."""
    return _core.validate_trace_json(_as_text(trace), need_prefix)


def verify_anchors(trace, empathy=0.5, logic=0.15):
    return _json.loads(_core.verify_anchors_json(_as_text(trace), empathy, logic))


def synthesize(config, corpus, out, seed, **kw):
    """Returns (exit_code, manifest)."""
    return _result(_core.synthesize(config, corpus, out, seed, **kw))


def build_dataset(config, triplets, out_dir, seed, **kw):
    return _result(_core.build_dataset(config, triplets, out_dir, seed, **kw))


def eval_auto(config, pairs, out_dir, **kw):
    return _result(_core.eval_auto(config, pairs, out_dir, **kw))


def eval_judge(config, cases, systems, out_dir, seed, **kw):
    """systems: mapping or list of (name, responses_path)."""
    items = list(systems.items()) if hasattr(systems, "items") else list(systems)
    return _result(_core.eval_judge(config, cases, items, out_dir, seed, **kw))
