"""ROUGE-N, ROUGE-L and ROUGE-SU4 over token lists.

Scores here are the plain (unweighted) variants: ROUGE-L uses LCS length with
F = 2PR/(P+R), and SU4 counts unigrams plus skip-bigrams with at most
``su4_max_gap`` intervening tokens.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .textproc import is_punctuation, ngrams, porter_stem

__all__ = [
    "RougeScore",
    "RougeConfig",
    "rouge_n",
    "rouge_l",
    "rouge_su4",
    "rouge_average",
    "lcs_length",
    "skip_bigrams",
    "evaluate_summary_rouge",
    "VARIANTS",
]

VARIANTS = ("rouge-1", "rouge-2", "rouge-l", "rouge-su4")


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_pr(cls, p: float, r: float) -> "RougeScore":
        f = 2 * p * r / (p + r) if p + r > 0 else 0.0
        return cls(p, r, f)

    @classmethod
    def from_counts(cls, overlap: int, n_cand: int, n_ref: int) -> "RougeScore":
        p = overlap / n_cand if n_cand else 0.0
        r = overlap / n_ref if n_ref else 0.0
        return cls.from_pr(p, r)

    def as_dict(self) -> dict[str, float]:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


@dataclass(frozen=True)
class RougeConfig:
    stemming: bool = False
    word_limit: int | None = None
    su4_max_gap: int = 4

    def __post_init__(self) -> None:
        if self.word_limit is not None and self.word_limit <= 0:
            raise ValueError("word_limit must be positive")
        if self.su4_max_gap < 0:
            raise ValueError("su4_max_gap must be non-negative")


DEFAULT_CONFIG = RougeConfig()


def _prepare(candidate, reference, config: RougeConfig):
    cand = list(candidate)
    ref = list(reference)
    if config.word_limit is not None:
        cand = cand[: config.word_limit]
    if config.stemming:
        cand = [porter_stem(t) for t in cand]
        ref = [porter_stem(t) for t in ref]
    return cand, ref


def _clipped_overlap(a: Counter, b: Counter) -> int:
    if len(a) > len(b):
        a, b = b, a
    return sum(min(c, b[g]) for g, c in a.items() if g in b)


def rouge_n(
    candidate: Sequence[str], reference: Sequence[str], n: int, config: RougeConfig = DEFAULT_CONFIG
) -> RougeScore:
    cand, ref = _prepare(candidate, reference, config)
    cg, rg = ngrams(cand, n), ngrams(ref, n)
    return RougeScore.from_counts(_clipped_overlap(cg, rg), sum(cg.values()), sum(rg.values()))


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else (cur[j] if cur[j] > prev[j + 1] else prev[j + 1]))
        prev = cur
    return prev[-1]


def rouge_l(
    candidate: Sequence[str], reference: Sequence[str], config: RougeConfig = DEFAULT_CONFIG
) -> RougeScore:
    cand, ref = _prepare(candidate, reference, config)
    return RougeScore.from_counts(lcs_length(cand, ref), len(cand), len(ref))


def skip_bigrams(tokens: Sequence[str], max_gap: int) -> Counter:
    """Ordered token pairs with at most ``max_gap`` tokens between them."""
    out: Counter = Counter()
    n = len(tokens)
    for i in range(n):
        for j in range(i + 1, min(n, i + max_gap + 2)):
            out[(tokens[i], tokens[j])] += 1
    return out


def _su_units(tokens: Sequence[str], max_gap: int) -> Counter:
    units = skip_bigrams(tokens, max_gap)
    units.update((t,) for t in tokens)
    return units


def rouge_su4(
    candidate: Sequence[str], reference: Sequence[str], config: RougeConfig = DEFAULT_CONFIG
) -> RougeScore:
    cand, ref = _prepare(candidate, reference, config)
    cu, ru = _su_units(cand, config.su4_max_gap), _su_units(ref, config.su4_max_gap)
    return RougeScore.from_counts(_clipped_overlap(cu, ru), sum(cu.values()), sum(ru.values()))


def rouge_average(
    candidate: Sequence[str], reference: Sequence[str], config: RougeConfig = DEFAULT_CONFIG
) -> float:
    """Mean F1 of ROUGE-1, ROUGE-2 and ROUGE-L."""
    return (
        rouge_n(candidate, reference, 1, config).f1
        + rouge_n(candidate, reference, 2, config).f1
        + rouge_l(candidate, reference, config).f1
    ) / 3.0


def evaluate_summary_rouge(
    summary_sentences: Sequence[Sequence[str]],
    references,
    config: RougeConfig = DEFAULT_CONFIG,
) -> dict[str, RougeScore]:
    """Score a summary against one or more references.

    Punctuation tokens are dropped from both sides before scoring, so the word
    limit counts words only. Multi-reference scores are the per-reference mean.
    """
    refs = list(references)
    if not refs:
        raise ValueError("at least one reference summary is required")
    cand = [t for sent in summary_sentences for t in sent if not is_punctuation(t)]
    if config.word_limit is not None:
        cand = cand[: config.word_limit]

    per_ref = []
    for ref in refs:
        sents = ref.sentences if hasattr(ref, "sentences") else ref
        ref_toks = [t for sent in sents for t in sent if not is_punctuation(t)]
        per_ref.append(
            {
                "rouge-1": rouge_n(cand, ref_toks, 1, config),
                "rouge-2": rouge_n(cand, ref_toks, 2, config),
                "rouge-l": rouge_l(cand, ref_toks, config),
                "rouge-su4": rouge_su4(cand, ref_toks, config),
            }
        )
    return {v: mean_scores([s[v] for s in per_ref]) for v in VARIANTS}


def mean_scores(scores: Sequence[RougeScore]) -> RougeScore:
    n = len(scores)
    if n == 0:
        return RougeScore(0.0, 0.0, 0.0)
    return RougeScore(
        sum(s.precision for s in scores) / n,
        sum(s.recall for s in scores) / n,
        sum(s.f1 for s in scores) / n,
    )
