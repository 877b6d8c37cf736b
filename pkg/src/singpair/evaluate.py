"""Instance-selection scoring against primary/secondary/all ground truth, and
ROUGE over extracted summaries."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from .candidates import Instance
from .corpus import CorpusError, CorpusRecord
from .oracle import GroundTruthSet
from .rouge import VARIANTS, RougeConfig, RougeScore, evaluate_summary_rouge, mean_scores
from .selection import assemble_extract

__all__ = [
    "SetScore",
    "SelectionEvalReport",
    "RougeReport",
    "uncollapse",
    "evaluate_selection",
    "aggregate_reports",
    "evaluate_rouge_run",
    "TARGETS",
]

TARGETS = ("primary", "secondary", "all")


def uncollapse(instances: Iterable) -> set:
    """Flatten singletons and pairs into the set of sentences they cover.

    Accepts :class:`Instance` objects or plain refs / tuples of refs."""
    out = set()
    for inst in instances:
        if isinstance(inst, Instance):
            out.update(inst.refs)
        elif isinstance(inst, tuple) and not hasattr(inst, "_fields"):
            out.update(inst)
        else:
            out.add(inst)
    return out


@dataclass(frozen=True)
class SetScore:
    hits: int
    predicted: int
    target: int

    @property
    def precision(self) -> float:
        return self.hits / self.predicted if self.predicted else 0.0

    @property
    def recall(self) -> float:
        return self.hits / self.target if self.target else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r > 0 else 0.0

    @property
    def empty_target(self) -> bool:
        return self.target == 0

    def __add__(self, other: "SetScore") -> "SetScore":
        return SetScore(self.hits + other.hits, self.predicted + other.predicted, self.target + other.target)

    def to_json(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "hits": self.hits,
            "predicted": self.predicted,
            "target": self.target,
            "empty_target": self.empty_target,
        }


@dataclass(frozen=True)
class SelectionEvalReport:
    primary: SetScore
    secondary: SetScore
    all: SetScore
    records: int = 1
    # sentences that are primary for one summary sentence and secondary for another
    primary_secondary_overlap: int = 0

    def __getitem__(self, target: str) -> SetScore:
        return getattr(self, target)

    def to_json(self) -> dict:
        out = {t: self[t].to_json() for t in TARGETS}
        out["records"] = self.records
        out["primary_secondary_overlap"] = self.primary_secondary_overlap
        return out

    def tsv_row(self) -> list[str]:
        return [f"{100 * v:.1f}" for t in TARGETS for v in (self[t].precision, self[t].recall, self[t].f1)]


def _gt_sets(gt_sets) -> tuple[set, set]:
    primary, secondary = set(), set()
    for g in gt_sets:
        if isinstance(g, GroundTruthSet):
            primary.add(g.primary)
            if g.secondary is not None:
                secondary.add(g.secondary)
        elif isinstance(g, tuple) and not hasattr(g, "_fields"):
            primary.add(g[0])
            secondary.update(g[1:])
        else:
            primary.add(g)
    return primary, secondary


def evaluate_selection(system: Iterable, gt_sets: Iterable) -> SelectionEvalReport:
    """Compare uncollapsed system sentences with ground-truth sentence sets.

    ``gt_sets`` holds :class:`GroundTruthSet` objects, or, for ad-hoc use, bare
    refs (singletons) and (primary, secondary) tuples."""
    predicted = uncollapse(system)
    primary, secondary = _gt_sets(gt_sets)
    everything = primary | secondary

    def score(target: set[Hashable]) -> SetScore:
        return SetScore(len(predicted & target), len(predicted), len(target))

    return SelectionEvalReport(
        score(primary), score(secondary), score(everything), 1, len(primary & secondary)
    )


def aggregate_reports(reports: Sequence[SelectionEvalReport]) -> SelectionEvalReport:
    """Micro-average: pool counts across records, then recompute P/R/F."""
    if not reports:
        raise ValueError("no reports to aggregate")
    p, s, a = reports[0].primary, reports[0].secondary, reports[0].all
    overlap = reports[0].primary_secondary_overlap
    records = reports[0].records
    for r in reports[1:]:
        p, s, a = p + r.primary, s + r.secondary, a + r.all
        overlap += r.primary_secondary_overlap
        records += r.records
    return SelectionEvalReport(p, s, a, records, overlap)


def write_report_tsv(rows: Iterable[tuple[str, SelectionEvalReport]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["system"] + [f"{t}_{m}" for t in TARGETS for m in ("P", "R", "F")])
        for name, rep in rows:
            w.writerow([name] + rep.tsv_row())


@dataclass
class RougeReport:
    scores: dict[str, RougeScore] = field(default_factory=dict)
    records: int = 0

    def to_json(self) -> dict:
        return {"records": self.records, **{v: s.as_dict() for v, s in self.scores.items()}}


def evaluate_rouge_run(
    selections: Mapping[str, Sequence[Instance]],
    corpus: Sequence[CorpusRecord],
    config: RougeConfig = RougeConfig(stemming=True, word_limit=100),
) -> RougeReport:
    """Mean ROUGE over records of the extract built from each selection.

    ``config.word_limit`` caps the extract before scoring."""
    by_id = {r.record_id: r for r in corpus}
    per_record = []
    for rid, instances in selections.items():
        rec = by_id.get(rid)
        if rec is None:
            raise CorpusError(f"selection refers to unknown record {rid!r}")
        if not rec.references:
            raise CorpusError(f"record {rid!r} has no reference summary")
        lookup = rec.sentence_lookup()
        unknown = [r for i in instances for r in i.refs if r not in lookup]
        if unknown:
            raise CorpusError(f"record {rid!r}: unknown sentence {unknown[0]}")
        extract = assemble_extract(instances, lookup, config.word_limit)
        per_record.append(evaluate_summary_rouge([extract], rec.references, config))
    return RougeReport({v: mean_scores([r[v] for r in per_record]) for v in VARIANTS}, len(per_record))
