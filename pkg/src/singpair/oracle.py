"""Ground-truth singleton/pair sets for summary sentences, and corpus statistics.

Each summary sentence is aligned to source sentences greedily: pick the
eligible source sentence with the highest mean ROUGE-1/2/L F1 against what is
left of the summary sentence, strip every word type it shares from the
summary sentence, repeat. A source sentence is eligible while it shares at
least ``min_overlap`` distinct content-word types with the residual.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import CorpusError, CorpusRecord, Document, SentenceRef, build_mega_document
from .rouge import RougeConfig, rouge_average
from .textproc import StopwordList, content_words, porter_stem

__all__ = [
    "OracleConfig",
    "GroundTruthSet",
    "OracleStats",
    "remove_overlap",
    "derive_ground_truth",
    "record_source_document",
    "derive_all",
    "corpus_statistics",
    "write_oracle",
    "read_oracle",
]


@dataclass(frozen=True)
class OracleConfig:
    stemming: bool = False
    min_overlap: int = 2
    max_per_doc: int = 20  # mega-document cap for multi-document records


@dataclass(frozen=True)
class GroundTruthSet:
    summary_index: int
    primary: SentenceRef
    secondary: SentenceRef | None
    raw_size: int

    def __post_init__(self) -> None:
        if self.raw_size < 1:
            raise ValueError("raw_size must be >= 1")
        if (self.secondary is not None) != (self.raw_size >= 2):
            raise ValueError("secondary must be present iff raw_size >= 2")
        if self.secondary == self.primary:
            raise ValueError("primary and secondary must differ")

    @property
    def sentences(self) -> frozenset[SentenceRef]:
        return frozenset(r for r in (self.primary, self.secondary) if r is not None)

    def to_json(self) -> dict:
        return {
            "summary_index": self.summary_index,
            "primary": _ref_json(self.primary),
            "secondary": _ref_json(self.secondary) if self.secondary else None,
            "raw_size": self.raw_size,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GroundTruthSet":
        sec = obj.get("secondary")
        return cls(
            int(obj["summary_index"]),
            SentenceRef(obj["primary"]["doc_id"], int(obj["primary"]["sent_index"])),
            SentenceRef(sec["doc_id"], int(sec["sent_index"])) if sec else None,
            int(obj["raw_size"]),
        )


def _ref_json(ref: SentenceRef) -> dict:
    return {"doc_id": ref.doc_id, "sent_index": ref.sent_index}


def _norm(tokens: Iterable[str], stemming: bool) -> list[str]:
    return [porter_stem(t) for t in tokens] if stemming else list(tokens)


def remove_overlap(
    summary_tokens: Sequence[str], source_tokens: Sequence[str], stemming: bool = False
) -> list[str]:
    """Drop every occurrence of any word type that also appears in the source."""
    if stemming:
        shared = {porter_stem(t) for t in source_tokens}
        return [t for t in summary_tokens if porter_stem(t) not in shared]
    shared = set(source_tokens)
    return [t for t in summary_tokens if t not in shared]


def _align(
    sentences: Sequence[Sequence[str]],
    summary_sentence: Sequence[str],
    stopwords: StopwordList,
    config: OracleConfig,
) -> list[int]:
    rcfg = RougeConfig(stemming=config.stemming)
    src_content = [set(_norm(content_words(s, stopwords), config.stemming)) for s in sentences]
    residual = list(summary_sentence)
    chosen: list[int] = []
    remaining = set(range(len(sentences)))
    while remaining and residual:
        res_content = set(_norm(content_words(residual, stopwords), config.stemming))
        best, best_sim = -1, -1.0
        for i in sorted(remaining):
            if len(src_content[i] & res_content) < config.min_overlap:
                continue
            sim = rouge_average(sentences[i], residual, rcfg)
            if sim > best_sim:
                best, best_sim = i, sim
        if best < 0:
            break
        chosen.append(best)
        remaining.discard(best)
        residual = remove_overlap(residual, sentences[best], config.stemming)
    return chosen


def derive_ground_truth(
    doc: Document,
    summary_sentence: Sequence[str],
    stopwords: StopwordList,
    config: OracleConfig = OracleConfig(),
    summary_index: int = 0,
) -> GroundTruthSet | None:
    """Align one summary sentence; ``None`` when nothing is eligible.

    Ties go to the earlier sentence in ``doc`` (for mega-documents that order is
    document date, then position)."""
    if not doc.sentences:
        raise CorpusError("document has no sentences")
    picks = _align([s.tokens for s in doc.sentences], summary_sentence, stopwords, config)
    if not picks:
        return None
    primary = doc.sentences[picks[0]].ref
    secondary = doc.sentences[picks[1]].ref if len(picks) > 1 else None
    return GroundTruthSet(summary_index, primary, secondary, len(picks))


def record_source_document(record: CorpusRecord, config: OracleConfig = OracleConfig()) -> Document:
    if record.is_multi_document:
        return build_mega_document(record.documents, config.max_per_doc)
    return record.documents[0]


def _raw_alignments(record: CorpusRecord, stopwords: StopwordList, config: OracleConfig):
    if record.summary is None:
        raise CorpusError(f"record {record.record_id!r} has no summary")
    doc = record_source_document(record, config)
    toks = [s.tokens for s in doc.sentences]
    for n, summ in enumerate(record.summary.sentences):
        picks = _align(toks, summ, stopwords, config) if toks else []
        yield n, [doc.sentences[i].ref for i in picks]


def derive_all(
    record: CorpusRecord, stopwords: StopwordList, config: OracleConfig = OracleConfig()
) -> list[GroundTruthSet]:
    out = []
    for n, refs in _raw_alignments(record, stopwords, config):
        if refs:
            out.append(GroundTruthSet(n, refs[0], refs[1] if len(refs) > 1 else None, len(refs)))
    return out


# --------------------------------------------------------------------------
# statistics


@dataclass
class OracleStats:
    size_histogram: dict[int, float]
    empty_fraction: float
    primary_position_histogram: dict[int, float]
    secondary_position_histogram: dict[int, float]
    fusion_rate_by_summary_position: dict[int, float]
    num_summary_sentences: int = 0

    def to_json(self) -> dict:
        def keyed(d):
            return {str(k): v for k, v in sorted(d.items())}

        return {
            "size_histogram": keyed(self.size_histogram),
            "empty_fraction": self.empty_fraction,
            "primary_position_histogram": keyed(self.primary_position_histogram),
            "secondary_position_histogram": keyed(self.secondary_position_histogram),
            "fusion_rate_by_summary_position": keyed(self.fusion_rate_by_summary_position),
            "num_summary_sentences": self.num_summary_sentences,
        }


@dataclass
class StatsCounter:
    """Mergeable counts behind :class:`OracleStats`."""

    sizes: Counter = field(default_factory=Counter)
    primary_pos: Counter = field(default_factory=Counter)
    secondary_pos: Counter = field(default_factory=Counter)
    pos_total: Counter = field(default_factory=Counter)
    pos_fused: Counter = field(default_factory=Counter)

    def merge(self, other: "StatsCounter") -> "StatsCounter":
        for name in ("sizes", "primary_pos", "secondary_pos", "pos_total", "pos_fused"):
            getattr(self, name).update(getattr(other, name))
        return self

    def finish(self, max_summary_position: int = 4) -> OracleStats:
        total = sum(self.sizes.values())
        if total == 0:
            raise CorpusError("no summary sentences to aggregate")

        def norm(c: Counter) -> dict[int, float]:
            s = sum(c.values())
            return {k: v / s for k, v in sorted(c.items())} if s else {}

        fusion = {
            p: self.pos_fused[p] / self.pos_total[p]
            for p in range(max_summary_position + 1)
            if self.pos_total[p]
        }
        return OracleStats(
            size_histogram=norm(self.sizes),
            empty_fraction=self.sizes[0] / total,
            primary_position_histogram=norm(self.primary_pos),
            secondary_position_histogram=norm(self.secondary_pos),
            fusion_rate_by_summary_position=fusion,
            num_summary_sentences=total,
        )


def record_stats(
    record: CorpusRecord, stopwords: StopwordList, config: OracleConfig = OracleConfig()
) -> StatsCounter:
    c = StatsCounter()
    for n, refs in _raw_alignments(record, stopwords, config):
        c.sizes[len(refs)] += 1
        if not refs:
            continue
        c.primary_pos[refs[0].sent_index] += 1
        if len(refs) > 1:
            c.secondary_pos[refs[1].sent_index] += 1
        c.pos_total[n] += 1
        c.pos_fused[n] += len(refs) > 1
    return c


def corpus_statistics(
    records: Sequence[CorpusRecord],
    stopwords: StopwordList,
    config: OracleConfig = OracleConfig(),
) -> OracleStats:
    if not records:
        raise CorpusError("empty corpus")
    total = StatsCounter()
    for rec in records:
        total.merge(record_stats(rec, stopwords, config))
    return total.finish()


# --------------------------------------------------------------------------
# oracle-jsonl


def write_oracle(rows: Iterable[tuple[str, Sequence[GroundTruthSet]]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record_id, sets in rows:
            fh.write(json.dumps({"record_id": record_id, "sets": [s.to_json() for s in sets]}) + "\n")


def read_oracle(path: str | Path) -> dict[str, list[GroundTruthSet]]:
    out: dict[str, list[GroundTruthSet]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                rid = obj["record_id"]
                sets = [GroundTruthSet.from_json(s) for s in obj["sets"]]
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise CorpusError(f"oracle line {lineno}: {exc}") from exc
            if rid in out:
                raise CorpusError(f"oracle line {lineno}: duplicate record_id {rid!r}")
            out[rid] = sets
    return out
