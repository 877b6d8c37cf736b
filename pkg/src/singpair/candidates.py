"""Singleton and pair instances: enumeration, labeling and downsampling."""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from functools import partial
from itertools import combinations, repeat
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

from .corpus import CorpusError, CorpusRecord, Document, Sentence, SentenceRef, sort_documents
from .oracle import GroundTruthSet

__all__ = [
    "Instance",
    "LabeledInstance",
    "enumerate_candidates",
    "pool_multidoc",
    "candidate_sentences",
    "label_candidates",
    "downsample",
    "write_instances",
    "read_instances",
]

SINGLETON = "singleton"
PAIR = "pair"


class _InstanceFields(NamedTuple):
    first: SentenceRef
    second: SentenceRef | None = None


class Instance(_InstanceFields):
    """A singleton (``second is None``) or an ordered pair of sentences.

    A named tuple so that building the quadratic candidate space stays cheap."""

    __slots__ = ()

    def __new__(cls, first: SentenceRef, second: SentenceRef | None = None):
        if second is not None and second == first:
            raise ValueError("a pair needs two distinct sentences")
        return super().__new__(cls, first, second)

    @classmethod
    def singleton(cls, ref: SentenceRef) -> "Instance":
        return cls(ref)

    @classmethod
    def pair(
        cls, a: SentenceRef, b: SentenceRef, order: Mapping[SentenceRef, int] | None = None
    ) -> "Instance":
        """Pair in canonical order: by ``order`` when given (position in the
        candidate list), otherwise by (doc_id, sent_index)."""
        key = order.__getitem__ if order is not None else tuple
        if key(b) < key(a):
            a, b = b, a
        return cls(a, b)

    @property
    def kind(self) -> str:
        return SINGLETON if self.second is None else PAIR

    @property
    def refs(self) -> tuple[SentenceRef, ...]:
        return (self.first,) if self.second is None else (self.first, self.second)

    @property
    def sentence_set(self) -> frozenset[SentenceRef]:
        return frozenset(self.refs)

    @property
    def instance_id(self) -> str:
        return "+".join(str(r) for r in self.refs)

    @classmethod
    def parse(cls, instance_id: str) -> "Instance":
        parts = instance_id.split("+")
        if len(parts) not in (1, 2):
            raise CorpusError(f"bad instance id {instance_id!r}")
        refs = [SentenceRef.parse(p) for p in parts]
        return cls(refs[0], refs[1] if len(refs) == 2 else None)

    def __str__(self) -> str:
        return self.instance_id


@dataclass(frozen=True)
class LabeledInstance:
    instance: Instance
    label: int
    query_id: str

    def to_json(self) -> dict:
        return {
            "query_id": self.query_id,
            "instance_id": self.instance.instance_id,
            "kind": self.instance.kind,
            "label": self.label,
        }


def enumerate_candidates(sentences: Sequence[Sentence | SentenceRef]) -> list[Instance]:
    """All singletons by position, then all pairs in lexicographic position order."""
    n = len(sentences)
    if n == 0:
        raise CorpusError("cannot enumerate candidates over zero sentences")
    refs = [s.ref if isinstance(s, Sentence) else s for s in sentences]
    if len(set(refs)) != n:
        raise CorpusError("duplicate sentence in candidate list")
    # C-level construction; pairs of distinct refs need no validation
    make = partial(tuple.__new__, Instance)
    out = list(map(make, zip(refs, repeat(None))))
    out.extend(map(make, combinations(refs, 2)))
    return out


def pool_multidoc(docs: Sequence[Document], top_k: int = 5) -> list[Sentence]:
    if not docs:
        raise CorpusError("cannot pool zero documents")
    pool: list[Sentence] = []
    for d in sort_documents(docs):
        pool.extend(d.sentences[:top_k])
    return pool


def candidate_sentences(
    record: CorpusRecord, max_sentences: int | None = 30, top_k: int = 5
) -> list[Sentence]:
    """Sentences over which a record's instance space is built: a top-k pool
    for multi-document input, otherwise a leading prefix of the document."""
    if record.is_multi_document:
        return pool_multidoc(record.documents, top_k)
    sents = list(record.documents[0].sentences)
    return sents[:max_sentences] if max_sentences else sents


def label_candidates(
    candidates: Sequence[Instance], gt_sets: Iterable[GroundTruthSet], query_id: str
) -> list[LabeledInstance]:
    positives = {g.sentences for g in gt_sets}
    return [LabeledInstance(c, int(c.sentence_set in positives), query_id) for c in candidates]


def _query_rng(seed: int, query_id: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{query_id}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def downsample(
    labeled: Sequence[LabeledInstance], ratio: int = 1, seed: int = 0
) -> list[LabeledInstance]:
    """Keep every positive and at most ``ratio`` negatives per positive, per query
    and per instance kind. Queries without positives are dropped. Output keeps
    input order."""
    if ratio < 1:
        raise ValueError("ratio must be >= 1")
    by_query: dict[str, list[int]] = {}
    for i, li in enumerate(labeled):
        by_query.setdefault(li.query_id, []).append(i)

    keep: set[int] = set()
    for qid, idxs in by_query.items():
        if not any(labeled[i].label for i in idxs):
            continue
        rng = _query_rng(seed, qid)
        for kind in (SINGLETON, PAIR):
            pos = [i for i in idxs if labeled[i].instance.kind == kind and labeled[i].label]
            neg = [i for i in idxs if labeled[i].instance.kind == kind and not labeled[i].label]
            keep.update(pos)
            k = min(len(neg), ratio * len(pos))
            keep.update(rng.sample(neg, k))
    return [labeled[i] for i in sorted(keep)]


def write_instances(rows: Iterable[LabeledInstance], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for li in rows:
            fh.write(json.dumps(li.to_json()) + "\n")


def read_instances(path: str | Path) -> list[LabeledInstance]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                inst = Instance.parse(obj["instance_id"])
                label = int(obj["label"])
                qid = str(obj["query_id"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise CorpusError(f"instance line {lineno}: {exc}") from exc
            if label not in (0, 1):
                raise CorpusError(f"instance line {lineno}: label must be 0 or 1")
            if obj.get("kind", inst.kind) != inst.kind:
                raise CorpusError(f"instance line {lineno}: kind does not match instance_id")
            out.append(LabeledInstance(inst, label, qid))
    return out
