# SPDX-License-Identifier: MIT

"""Overlap between the function sequences of a training and a test corpus."""

from typing import Iterable

from fcsynth.errors import InputValidationError
from fcsynth.model.contamination import ContaminationReport, Granularity
from fcsynth.model.fsp import Fsp

Sequence = tuple[str, ...]


def tokenize_fsp(fsp: Fsp, granularity: Granularity = "function") -> list[str]:
    """Function ids in order, or one '+'-joined token per non-empty turn."""
    if granularity == "turn":
        return ["+".join(turn["functions"]) for turn in fsp["turns"] if turn["functions"]]
    return [fid for turn in fsp["turns"] for fid in turn["functions"]]


def _ngrams(tokens: Sequence, n: int) -> set[Sequence]:
    return {tokens[i : i + n] for i in range(len(tokens) - n + 1)}


def exact_match_rate(train: Iterable[list[str]], test: Iterable[list[str]]) -> float:
    """Share of distinct test sequences found verbatim in train, in percent."""
    test_set = {tuple(seq) for seq in test}
    if not test_set:
        raise InputValidationError("test corpus is empty")
    train_set = {tuple(seq) for seq in train}
    return 100.0 * len(test_set & train_set) / len(test_set)


def ngram_overlap(train: Iterable[list[str]], test: Iterable[list[str]], n: int = 2) -> float:
    """Share of distinct test n-grams that also occur in train, in percent."""
    if n < 1:
        raise InputValidationError("n must be at least 1")
    test_grams: set[Sequence] = set()
    for seq in test:
        test_grams |= _ngrams(tuple(seq), n)
    if not test_grams:
        raise InputValidationError(f"no test sequence has {n} or more tokens")
    train_grams: set[Sequence] = set()
    for seq in train:
        train_grams |= _ngrams(tuple(seq), n)
    return 100.0 * len(test_grams & train_grams) / len(test_grams)


def contamination_report(
    train: list[Fsp], test: list[Fsp], n: int = 2, granularity: Granularity = "function"
) -> ContaminationReport:
    train_seqs = [tokenize_fsp(fsp, granularity) for fsp in train]
    test_seqs = [tokenize_fsp(fsp, granularity) for fsp in test]
    return {
        "exact_match_pct": exact_match_rate(train_seqs, test_seqs),
        "ngram_pct": ngram_overlap(train_seqs, test_seqs, n),
        "n": n,
        "granularity": granularity,
        "train_size": len(train_seqs),
        "test_size": len(test_seqs),
    }
