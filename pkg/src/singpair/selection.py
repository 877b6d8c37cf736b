"""MMR selection of singletons/pairs and extract assembly."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .candidates import Instance
from .corpus import CorpusError, Sentence, SentenceRef
from .textproc import is_punctuation
from .vsm import IdfTable, cosine, instance_vector, mean_vector

__all__ = [
    "SelectionConfig",
    "SelectionResult",
    "TraceStep",
    "normalize_scores",
    "mmr_select",
    "assemble_extract",
    "write_selections",
    "read_selections",
]


@dataclass(frozen=True)
class SelectionConfig:
    lam: float = 0.6
    budget_instances: int | None = None
    budget_words: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lambda must lie in [0, 1]")
        if self.budget_instances is None and self.budget_words is None:
            raise ValueError("set at least one of budget_instances / budget_words")
        for b in (self.budget_instances, self.budget_words):
            if b is not None and b < 1:
                raise ValueError("budgets must be positive")


@dataclass(frozen=True)
class TraceStep:
    instance_id: str
    importance: float
    redundancy: float
    mmr: float

    def to_json(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "importance": self.importance,
            "redundancy": self.redundancy,
            "mmr": self.mmr,
        }


@dataclass
class SelectionResult:
    selected: list[Instance] = field(default_factory=list)
    mmr_trace: list[TraceStep] = field(default_factory=list)


def normalize_scores(scores: Mapping[str, float]) -> dict[str, float]:
    """Min-max to [0, 1]; a constant score map becomes all 0.5."""
    if not scores:
        raise ValueError("no scores to normalize")
    lo, hi = min(scores.values()), max(scores.values())
    if hi == lo:
        return {k: 0.5 for k in scores}
    span = hi - lo
    return {k: (v - lo) / span for k, v in scores.items()}


def _word_count(instance: Instance, lookup: Mapping[SentenceRef, Sentence]) -> int:
    return sum(1 for r in instance.refs for t in lookup[r].tokens if not is_punctuation(t))


def mmr_select(
    candidates: Sequence[Instance],
    scores: Mapping[str, float],
    idf: IdfTable | None,
    config: SelectionConfig,
    lookup: Mapping[SentenceRef, Sentence] | None = None,
    vectors: Mapping[str, Mapping[str, float]] | None = None,
) -> SelectionResult:
    """Greedy MMR: maximize lam * score - (1 - lam) * cos(instance, summary),
    the summary vector being the mean of the selected instances' vectors.

    Vectors come from ``vectors`` (keyed by instance id) when supplied, else are
    built from ``idf`` and ``lookup``. Ties go to the earlier candidate.
    """
    if not candidates:
        raise ValueError("no candidates to select from")
    missing = [c.instance_id for c in candidates if c.instance_id not in scores]
    if missing:
        raise ValueError(f"no score for {missing[0]} ({len(missing)} missing)")
    if config.budget_words is not None and lookup is None:
        raise ValueError("a word budget needs the sentence lookup")

    need_vectors = config.lam < 1.0
    if need_vectors and vectors is None:
        if idf is None or lookup is None:
            raise ValueError("redundancy needs vectors, or an IDF table and sentence lookup")
        cache: dict = {}
        vectors = {c.instance_id: instance_vector(c, idf, lookup, cache) for c in candidates}

    remaining = list(candidates)
    result = SelectionResult()
    picked_vecs: list = []
    summary_vec: dict = {}
    words = 0
    lam = config.lam
    while remaining:
        if config.budget_instances is not None and len(result.selected) >= config.budget_instances:
            break
        best = None
        for pos, c in enumerate(remaining):
            imp = scores[c.instance_id]
            red = cosine(vectors[c.instance_id], summary_vec) if need_vectors and summary_vec else 0.0
            val = lam * imp - (1.0 - lam) * red
            if best is None or val > best[0]:
                best = (val, pos, imp, red)
        val, pos, imp, red = best
        pick = remaining[pos]
        if config.budget_words is not None:
            w = _word_count(pick, lookup)
            if words + w > config.budget_words:
                break
            words += w
        remaining.pop(pos)
        result.selected.append(pick)
        result.mmr_trace.append(TraceStep(pick.instance_id, imp, red, val))
        if need_vectors:
            picked_vecs.append(vectors[pick.instance_id])
            summary_vec = mean_vector(picked_vecs)
    return result


def assemble_extract(
    selected: SelectionResult | Iterable[Instance],
    lookup: Mapping[SentenceRef, Sentence],
    word_cap: int | None = None,
) -> list[str]:
    """Concatenate selected sentences in selection order, cut after ``word_cap``
    non-punctuation tokens."""
    instances = selected.selected if isinstance(selected, SelectionResult) else selected
    out: list[str] = []
    words = 0
    for inst in instances:
        for ref in inst.refs:
            for tok in lookup[ref].tokens:
                if word_cap is not None and not is_punctuation(tok):
                    if words >= word_cap:
                        return out
                    words += 1
                out.append(tok)
    return out


# --------------------------------------------------------------------------
# selection-jsonl


def write_selections(rows: Iterable[tuple[str, SelectionResult]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record_id, res in rows:
            obj = {
                "record_id": record_id,
                "selected": [i.instance_id for i in res.selected],
                "trace": [t.to_json() for t in res.mmr_trace],
            }
            fh.write(json.dumps(obj) + "\n")


def read_selections(path: str | Path) -> dict[str, list[Instance]]:
    out: dict[str, list[Instance]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                rid = obj["record_id"]
                sel = [Instance.parse(i) for i in obj["selected"]]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CorpusError(f"selection line {lineno}: {exc}") from exc
            if rid in out:
                raise CorpusError(f"selection line {lineno}: duplicate record_id {rid!r}")
            out[rid] = sel
    return out
