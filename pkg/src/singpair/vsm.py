"""Sparse TF-IDF sentence/document/instance vectors and ranking features."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .candidates import Instance
from .corpus import CorpusError, CorpusRecord, Document, Sentence, SentenceRef
from .textproc import StopwordList, content_words, default_stopwords, is_punctuation

__all__ = [
    "IdfTable",
    "SparseVector",
    "InstanceFeatures",
    "fit_idf",
    "sentence_ngrams",
    "sentence_vector",
    "document_vector",
    "instance_vector",
    "mean_vector",
    "cosine",
    "featurize_instance",
    "dense_features",
    "FEATURE_NAMES",
    "TOP_M",
]

TOP_M = 20
FEATURE_NAMES = (
    ["centrality", "position_first", "position_second", "kind_flag", "tfidf_sum", "tfidf_mean"]
    + [f"top_weight_{i}" for i in range(TOP_M)]
    + ["content_words"]
)

SparseVector = dict  # n-gram (str) -> positive weight


def _gram_key(gram: Sequence[str]) -> str:
    return " ".join(gram)


def sentence_ngrams(
    tokens: Sequence[str], stopwords: StopwordList, n_range: tuple[int, int] = (1, 2)
) -> Counter:
    """Term counts of n-grams, skipping n-grams made only of stopwords/punctuation."""
    lo, hi = n_range
    out: Counter = Counter()
    junk = [t in stopwords or is_punctuation(t) for t in tokens]
    for n in range(lo, hi + 1):
        for i in range(len(tokens) - n + 1):
            if all(junk[i : i + n]):
                continue
            out[_gram_key(tokens[i : i + n])] += 1
    return out


@dataclass
class IdfTable:
    doc_count: int
    df: dict[str, int]
    n_range: tuple[int, int] = (1, 2)
    stopwords: StopwordList = field(default_factory=default_stopwords, repr=False)

    def __post_init__(self) -> None:
        if self.doc_count < 1:
            raise ValueError("doc_count must be >= 1")
        for g, c in self.df.items():
            if not 1 <= c <= self.doc_count:
                raise ValueError(f"df[{g!r}]={c} outside [1, {self.doc_count}]")

    def idf(self, gram: str) -> float:
        return math.log(self.doc_count / self.df.get(gram, 1))

    def to_json(self) -> dict:
        return {
            "doc_count": self.doc_count,
            "n_range": list(self.n_range),
            "df": dict(sorted(self.df.items())),
        }

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, ensure_ascii=False)

    @classmethod
    def load(cls, path: str | Path, stopwords: StopwordList | None = None) -> "IdfTable":
        try:
            with open(path, encoding="utf-8") as fh:
                obj = json.load(fh)
            return cls(
                int(obj["doc_count"]),
                {str(k): int(v) for k, v in obj["df"].items()},
                tuple(obj["n_range"]),
                stopwords or default_stopwords(),
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CorpusError(f"bad IDF table {path}: {exc}") from exc


def fit_idf(
    records: Iterable[CorpusRecord],
    n_range: tuple[int, int] = (1, 2),
    stopwords: StopwordList | None = None,
) -> IdfTable:
    stopwords = stopwords or default_stopwords()
    df: Counter = Counter()
    n_docs = 0
    for rec in records:
        for doc in rec.documents:
            n_docs += 1
            grams: set[str] = set()
            for s in doc.sentences:
                grams.update(sentence_ngrams(s.tokens, stopwords, n_range))
            df.update(grams)
    if n_docs == 0:
        raise CorpusError("cannot fit IDF on an empty corpus")
    return IdfTable(n_docs, dict(df), n_range, stopwords)


def sentence_vector(sentence: Sentence | Sequence[str], idf: IdfTable) -> SparseVector:
    tokens = sentence.tokens if isinstance(sentence, Sentence) else sentence
    vec = {}
    for g, tf in sentence_ngrams(tokens, idf.stopwords, idf.n_range).items():
        w = tf * idf.idf(g)
        if w > 0:
            vec[g] = w
    return vec


def mean_vector(vectors: Sequence[Mapping[str, float]]) -> SparseVector:
    if not vectors:
        return {}
    acc: dict[str, float] = {}
    for v in vectors:
        for g, w in v.items():
            acc[g] = acc.get(g, 0.0) + w
    n = len(vectors)
    return {g: w / n for g, w in acc.items() if w > 0}


def document_vector(doc: Document | Sequence[Sentence], idf: IdfTable) -> SparseVector:
    sents = doc.sentences if isinstance(doc, Document) else doc
    if not sents:
        raise CorpusError("document vector of an empty document")
    return mean_vector([sentence_vector(s, idf) for s in sents])


def instance_vector(
    instance: Instance,
    idf: IdfTable,
    lookup: Mapping[SentenceRef, Sentence],
    cache: dict | None = None,
) -> SparseVector:
    """Singleton: the sentence vector. Pair: mean of the two sentence vectors."""

    def vec(ref: SentenceRef) -> SparseVector:
        if cache is None:
            return sentence_vector(lookup[ref], idf)
        if ref not in cache:
            cache[ref] = sentence_vector(lookup[ref], idf)
        return cache[ref]

    if instance.second is None:
        return dict(vec(instance.first))
    return mean_vector([vec(instance.first), vec(instance.second)])


def cosine(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    if not a or not b:
        return 0.0
    if len(a) > len(b):
        a, b = b, a
    dot = sum(w * b[g] for g, w in a.items() if g in b)
    if dot <= 0:
        return 0.0
    na = math.sqrt(sum(w * w for w in a.values()))
    nb = math.sqrt(sum(w * w for w in b.values()))
    return min(1.0, dot / (na * nb))


@dataclass(frozen=True)
class InstanceFeatures:
    vector: SparseVector
    position_first: float
    position_second: float
    centrality: float
    kind_flag: int
    content_word_count: int = 0


def _position(ref: SentenceRef, doc_lengths: Mapping[str, int] | int) -> float:
    n = doc_lengths if isinstance(doc_lengths, int) else doc_lengths[ref.doc_id]
    return ref.sent_index / max(1, n - 1)


def featurize_instance(
    instance: Instance,
    doc_vector: Mapping[str, float],
    idf: IdfTable,
    doc_length: Mapping[str, int] | int,
    lookup: Mapping[SentenceRef, Sentence],
    cache: dict | None = None,
) -> InstanceFeatures:
    """``doc_length`` is either one length or a doc_id -> length map (for
    mega-documents, whose sentences keep their original positions)."""
    vec = instance_vector(instance, idf, lookup, cache)
    p1 = _position(instance.first, doc_length)
    p2 = _position(instance.second, doc_length) if instance.second is not None else p1
    n_content = sum(len(content_words(lookup[r].tokens, idf.stopwords)) for r in instance.refs)
    return InstanceFeatures(
        vector=vec,
        position_first=min(1.0, p1),
        position_second=min(1.0, p2),
        centrality=cosine(vec, doc_vector),
        kind_flag=0 if instance.second is None else 1,
        content_word_count=n_content,
    )


def dense_features(f: InstanceFeatures) -> np.ndarray:
    """Fixed-width row for the tree ranker (see ``FEATURE_NAMES``)."""
    weights = sorted(f.vector.values(), reverse=True)
    top = weights[:TOP_M] + [0.0] * max(0, TOP_M - len(weights))
    total = float(sum(weights))
    row = [
        f.centrality,
        f.position_first,
        f.position_second,
        float(f.kind_flag),
        total,
        total / len(weights) if weights else 0.0,
        *top,
        float(f.content_word_count),
    ]
    return np.asarray(row, dtype=np.float64)
