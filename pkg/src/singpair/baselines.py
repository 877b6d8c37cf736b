"""Classical sentence-extraction baselines. All return singleton instances."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .candidates import Instance
from .corpus import CorpusError, Document
from .textproc import StopwordList, content_words
from .vsm import IdfTable, cosine, sentence_vector

__all__ = ["BaselineConfig", "lead", "sumbasic", "klsum", "lexrank", "lexrank_scores", "BASELINES"]


@dataclass(frozen=True)
class BaselineConfig:
    n_sentences: int = 4
    lexrank_damping: float = 0.85
    lexrank_threshold: float = 0.1
    lexrank_tolerance: float = 1e-6
    klsum_epsilon: float = 1e-9

    def __post_init__(self) -> None:
        if self.n_sentences < 1:
            raise ValueError("n_sentences must be >= 1")
        if not 0 < self.lexrank_damping < 1:
            raise ValueError("damping must lie in (0, 1)")
        if not 0 <= self.lexrank_threshold <= 1:
            raise ValueError("threshold must lie in [0, 1]")


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")


def lead(doc: Document, n: int) -> list[Instance]:
    _check_n(n)
    return [Instance(s.ref) for s in doc.sentences[:n]]


def sumbasic(doc: Document, n: int, stopwords: StopwordList) -> list[Instance]:
    _check_n(n)
    words = [content_words(s.tokens, stopwords) for s in doc.sentences]
    counts = Counter(w for ws in words for w in ws)
    total = sum(counts.values())
    if total == 0:
        raise CorpusError(f"document {doc.doc_id!r} has no content words")
    prob = {w: c / total for w, c in counts.items()}
    # first-occurrence order settles ties among equally probable words
    first_seen = {}
    for ws in words:
        for w in ws:
            first_seen.setdefault(w, len(first_seen))

    def score(i: int) -> float:
        ws = words[i]
        return sum(prob[w] for w in ws) / len(ws) if ws else 0.0

    chosen: list[int] = []
    left = set(range(len(doc.sentences)))
    while left and len(chosen) < n:
        pick = None
        for w in sorted(prob, key=lambda w: (-prob[w], first_seen[w])):
            holders = [i for i in sorted(left) if w in words[i]]
            if holders:
                pick = max(holders, key=lambda i: (score(i), -i))
                break
        if pick is None:  # only content-free sentences remain
            pick = min(left)
        chosen.append(pick)
        left.discard(pick)
        for w in set(words[pick]):
            prob[w] = prob[w] ** 2
    return [Instance(doc.sentences[i].ref) for i in chosen]


def _kl(p: dict[str, float], q_counts: Counter, vocab_size: int, eps: float) -> float:
    total = sum(q_counts.values()) + eps * vocab_size
    out = 0.0
    for w, pw in p.items():
        out += pw * math.log(pw / ((q_counts.get(w, 0) + eps) / total))
    return out


def klsum(doc: Document, n: int, stopwords: StopwordList, epsilon: float = 1e-9) -> list[Instance]:
    """Greedy KL(P_doc || P_summary) minimisation over content-word unigrams."""
    _check_n(n)
    words = [content_words(s.tokens, stopwords) for s in doc.sentences]
    counts = Counter(w for ws in words for w in ws)
    total = sum(counts.values())
    if total == 0:
        raise CorpusError(f"document {doc.doc_id!r} has no content words")
    p_doc = {w: c / total for w, c in counts.items()}
    summary: Counter = Counter()
    chosen: list[int] = []
    left = list(range(len(doc.sentences)))
    while left and len(chosen) < n:
        best = None
        for i in left:
            kl = _kl(p_doc, summary + Counter(words[i]), len(counts), epsilon)
            if best is None or kl < best[0]:
                best = (kl, i)
        i = best[1]
        chosen.append(i)
        left.remove(i)
        summary.update(words[i])
    return [Instance(doc.sentences[i].ref) for i in chosen]


def lexrank_scores(doc: Document, idf: IdfTable, config: BaselineConfig = BaselineConfig()) -> np.ndarray:
    """Stationary distribution of the damped walk over the thresholded cosine
    graph (no self loops; rows without edges teleport uniformly)."""
    m = len(doc.sentences)
    if m == 0:
        return np.zeros(0)
    vecs = [sentence_vector(s, idf) for s in doc.sentences]
    W = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            c = cosine(vecs[i], vecs[j])
            if c >= config.lexrank_threshold and c > 0:
                W[i, j] = W[j, i] = c
    rows = W.sum(axis=1)
    P = np.where(rows[:, None] > 0, W / np.where(rows > 0, rows, 1.0)[:, None], 1.0 / m)
    d = config.lexrank_damping
    p = np.full(m, 1.0 / m)
    for _ in range(10_000):
        nxt = (1.0 - d) / m + d * (P.T @ p)
        nxt /= nxt.sum()
        done = np.abs(nxt - p).sum() < config.lexrank_tolerance
        p = nxt
        if done:
            break
    return p


def lexrank(doc: Document, n: int, idf: IdfTable, config: BaselineConfig = BaselineConfig()) -> list[Instance]:
    _check_n(n)
    scores = lexrank_scores(doc, idf, config)
    # round away power-iteration noise so symmetric nodes tie exactly
    keyed = np.round(scores, 12)
    order = sorted(range(len(scores)), key=lambda i: (-keyed[i], i))
    return [Instance(doc.sentences[i].ref) for i in order[:n]]


BASELINES = ("lead", "sumbasic", "klsum", "lexrank")
