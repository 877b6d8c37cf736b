"""Per-record glue: dataset profiles, featurization, scoring and selection."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Mapping, Sequence, TypeVar

import numpy as np

from .candidates import Instance, LabeledInstance, candidate_sentences, downsample, enumerate_candidates, label_candidates
from .corpus import CorpusRecord
from .oracle import GroundTruthSet, OracleConfig, record_source_document
from .ranker import LambdaMartModel
from .selection import SelectionConfig, SelectionResult, mmr_select, normalize_scores
from .vsm import FEATURE_NAMES, IdfTable, dense_features, document_vector, featurize_instance, instance_vector

__all__ = [
    "Profile",
    "PROFILES",
    "record_candidates",
    "featurize_record",
    "training_instances",
    "score_record",
    "select_record",
    "parallel_map",
]

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class Profile:
    name: str
    n_instances: int
    word_cap: int
    top_k: int = 5
    max_per_doc: int = 20
    max_sentences: int | None = 30
    multi_document: bool = False

    def __post_init__(self) -> None:
        for v in (self.n_instances, self.word_cap, self.top_k, self.max_per_doc):
            if v < 1:
                raise ValueError(f"profile {self.name}: values must be positive")
        if self.max_sentences is not None and self.max_sentences < 1:
            raise ValueError(f"profile {self.name}: max_sentences must be positive")

    def override(self, **kw) -> "Profile":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    @property
    def oracle_config(self) -> OracleConfig:
        return OracleConfig(max_per_doc=self.max_per_doc)


PROFILES = {
    "cnndm": Profile("cnndm", n_instances=4, word_cap=100),
    "xsum": Profile("xsum", n_instances=1, word_cap=40),
    "duc04": Profile("duc04", n_instances=5, word_cap=100, top_k=5, max_per_doc=20, multi_document=True),
}


def record_candidates(record: CorpusRecord, profile: Profile) -> list[Instance]:
    return enumerate_candidates(candidate_sentences(record, profile.max_sentences, profile.top_k))


def featurize_record(
    record: CorpusRecord, instances: Sequence[Instance], idf: IdfTable, profile: Profile
) -> np.ndarray:
    lookup = record.sentence_lookup()
    source = record_source_document(record, profile.oracle_config)
    doc_vec = document_vector(source, idf)
    lengths = record.doc_lengths()
    cache: dict = {}
    rows = [
        dense_features(featurize_instance(inst, doc_vec, idf, lengths, lookup, cache))
        for inst in instances
    ]
    if not rows:
        return np.zeros((0, len(FEATURE_NAMES)))
    return np.vstack(rows)


def training_instances(
    record: CorpusRecord,
    gt_sets: Sequence[GroundTruthSet],
    profile: Profile,
    ratio: int | None = 1,
    seed: int = 0,
) -> list[LabeledInstance]:
    """Labeled candidates for one record; downsampled unless ``ratio`` is None."""
    labeled = label_candidates(record_candidates(record, profile), gt_sets, record.record_id)
    return downsample(labeled, ratio, seed) if ratio else labeled


def score_record(
    model: LambdaMartModel, record: CorpusRecord, idf: IdfTable, profile: Profile
) -> dict[str, float]:
    instances = record_candidates(record, profile)
    scores = model.predict(featurize_record(record, instances, idf, profile))
    return {inst.instance_id: float(s) for inst, s in zip(instances, scores)}


def select_record(
    record: CorpusRecord,
    raw_scores: Mapping[str, float],
    idf: IdfTable,
    profile: Profile,
    lam: float = 0.6,
    singletons_only: bool = False,
) -> SelectionResult:
    """MMR over the record's candidate space. Candidates missing from
    ``raw_scores`` are skipped (e.g. external files scoring a subset)."""
    candidates = [c for c in record_candidates(record, profile) if c.instance_id in raw_scores]
    if singletons_only:
        candidates = [c for c in candidates if c.second is None]
    if not candidates:
        return SelectionResult()
    scores = normalize_scores({c.instance_id: raw_scores[c.instance_id] for c in candidates})
    lookup = record.sentence_lookup()
    cache: dict = {}
    vectors = {c.instance_id: instance_vector(c, idf, lookup, cache) for c in candidates}
    config = SelectionConfig(lam=lam, budget_instances=profile.n_instances)
    return mmr_select(candidates, scores, idf, config, lookup, vectors)


def parallel_map(fn: Callable[[T], R], items: Iterable[T], jobs: int | None = None) -> list[R]:
    """Order-preserving map over records; ``jobs`` <= 1 runs inline."""
    items = list(items)
    jobs = jobs or os.cpu_count() or 1
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))
