"""Corpus data model, JSONL ingestion, and mega-document construction."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from .textproc import DEFAULT_TOKENIZER, TokenizerConfig, tokenize

__all__ = [
    "CorpusError",
    "SentenceRef",
    "Sentence",
    "Document",
    "ReferenceSummary",
    "CorpusRecord",
    "load_corpus",
    "dump_corpus",
    "record_from_json",
    "record_to_json",
    "sort_documents",
    "build_mega_document",
]


class CorpusError(ValueError):
    """Malformed or inconsistent corpus input."""


class SentenceRef(NamedTuple):
    doc_id: str
    sent_index: int

    def __str__(self) -> str:
        return f"{self.doc_id}:{self.sent_index}"

    @classmethod
    def parse(cls, text: str) -> "SentenceRef":
        doc_id, sep, idx = text.rpartition(":")
        if not sep or not idx.lstrip("-").isdigit():
            raise CorpusError(f"bad sentence reference {text!r}")
        return cls(doc_id, int(idx))


@dataclass(frozen=True)
class Sentence:
    doc_id: str
    sent_index: int
    tokens: tuple[str, ...]
    text: str

    @property
    def ref(self) -> SentenceRef:
        return SentenceRef(self.doc_id, self.sent_index)


@dataclass(frozen=True)
class Document:
    doc_id: str
    sentences: tuple[Sentence, ...]
    date: str | None = None

    def __len__(self) -> int:
        return len(self.sentences)

    @classmethod
    def from_texts(
        cls,
        doc_id: str,
        texts: Iterable[str],
        date: str | None = None,
        tokenizer: TokenizerConfig = DEFAULT_TOKENIZER,
    ) -> "Document":
        """Build a document; whitespace-only sentences are dropped but keep
        their slot, so ``sent_index`` always reflects the original position."""
        sents = []
        for i, text in enumerate(texts):
            if not text.strip():
                continue
            sents.append(Sentence(doc_id, i, tuple(tokenize(text, tokenizer)), text))
        return cls(doc_id, tuple(sents), date)


@dataclass(frozen=True)
class ReferenceSummary:
    sentences: tuple[tuple[str, ...], ...]
    texts: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.sentences:
            raise CorpusError("reference summary needs at least one sentence")

    @classmethod
    def from_texts(
        cls, texts: Iterable[str], tokenizer: TokenizerConfig = DEFAULT_TOKENIZER
    ) -> "ReferenceSummary":
        kept = [t for t in texts if t.strip()]
        return cls(tuple(tuple(tokenize(t, tokenizer)) for t in kept), tuple(kept))

    @property
    def tokens(self) -> list[str]:
        return [tok for sent in self.sentences for tok in sent]


@dataclass(frozen=True)
class CorpusRecord:
    record_id: str
    documents: tuple[Document, ...]
    summary: ReferenceSummary | None = None
    extra_references: tuple[ReferenceSummary, ...] = field(default=())

    @property
    def is_multi_document(self) -> bool:
        return len(self.documents) > 1

    @property
    def references(self) -> list[ReferenceSummary]:
        refs = [self.summary] if self.summary is not None else []
        return refs + list(self.extra_references)

    def sentence_lookup(self) -> dict[SentenceRef, Sentence]:
        return {s.ref: s for d in self.documents for s in d.sentences}

    def doc_lengths(self) -> dict[str, int]:
        """Original sentence count per document (dropped blanks included)."""
        return {
            d.doc_id: (d.sentences[-1].sent_index + 1 if d.sentences else 0)
            for d in self.documents
        }


def _date_key(doc: Document) -> tuple:
    # undated documents go last, ordered by id
    return (doc.date is None, doc.date or "", doc.doc_id)


def sort_documents(docs: Sequence[Document]) -> list[Document]:
    return sorted(docs, key=_date_key)


def build_mega_document(docs: Sequence[Document], max_per_doc: int = 20) -> Document:
    """Concatenate the first ``max_per_doc`` sentences of each document in date
    order. Sentences keep their own ``doc_id`` and ``sent_index``."""
    if not docs:
        raise CorpusError("cannot build a mega-document from zero documents")
    if max_per_doc < 1:
        raise CorpusError("max_per_doc must be positive")
    ordered = sort_documents(docs)
    sents: list[Sentence] = []
    for d in ordered:
        sents.extend(d.sentences[:max_per_doc])
    mega_id = "+".join(d.doc_id for d in ordered)
    return Document(mega_id, tuple(sents), ordered[0].date)


# --------------------------------------------------------------------------
# JSONL (de)serialization


def _require(obj: dict, key: str, kind: type, where: str):
    if key not in obj:
        raise CorpusError(f"{where}: missing field {key!r}")
    val = obj[key]
    if not isinstance(val, kind):
        raise CorpusError(f"{where}: field {key!r} has wrong type")
    return val


def _texts(val, where: str) -> list[str]:
    if not isinstance(val, list) or not all(isinstance(t, str) for t in val):
        raise CorpusError(f"{where}: expected a list of strings")
    return val


def record_from_json(
    obj: dict,
    where: str = "record",
    require_summary: bool = False,
    tokenizer: TokenizerConfig = DEFAULT_TOKENIZER,
) -> CorpusRecord:
    if not isinstance(obj, dict):
        raise CorpusError(f"{where}: expected a JSON object")
    record_id = _require(obj, "record_id", str, where)
    raw_docs = _require(obj, "documents", list, where)
    if not raw_docs:
        raise CorpusError(f"{where}: no documents")
    docs = []
    seen_docs = set()
    for i, rd in enumerate(raw_docs):
        dw = f"{where} document {i}"
        if not isinstance(rd, dict):
            raise CorpusError(f"{dw}: expected a JSON object")
        doc_id = _require(rd, "doc_id", str, dw)
        if not doc_id or "+" in doc_id:
            raise CorpusError(f"{dw}: doc_id must be non-empty and free of '+'")
        if doc_id in seen_docs:
            raise CorpusError(f"{dw}: duplicate doc_id {doc_id!r}")
        seen_docs.add(doc_id)
        date = rd.get("date")
        if date is not None and not isinstance(date, str):
            raise CorpusError(f"{dw}: date must be a string or null")
        texts = _texts(_require(rd, "sentences", list, dw), dw)
        docs.append(Document.from_texts(doc_id, texts, date, tokenizer))

    summary = None
    raw_summary = obj.get("summary")
    if raw_summary is not None:
        summary = ReferenceSummary.from_texts(_texts(raw_summary, f"{where} summary"), tokenizer)
    elif require_summary:
        raise CorpusError(f"{where}: summary required but missing")

    extras = []
    for j, ref in enumerate(obj.get("extra_references") or []):
        extras.append(ReferenceSummary.from_texts(_texts(ref, f"{where} reference {j}"), tokenizer))
    return CorpusRecord(record_id, tuple(docs), summary, tuple(extras))


def record_to_json(record: CorpusRecord) -> dict:
    def doc_texts(d: Document) -> list[str]:
        n = d.sentences[-1].sent_index + 1 if d.sentences else 0
        texts = [""] * n
        for s in d.sentences:
            texts[s.sent_index] = s.text
        return texts

    return {
        "record_id": record.record_id,
        "documents": [
            {"doc_id": d.doc_id, "date": d.date, "sentences": doc_texts(d)}
            for d in record.documents
        ],
        "summary": list(record.summary.texts) if record.summary else None,
        "extra_references": [list(r.texts) for r in record.extra_references] or None,
    }


def load_corpus(
    path: str | Path,
    require_summary: bool = False,
    tokenizer: TokenizerConfig = DEFAULT_TOKENIZER,
) -> list[CorpusRecord]:
    records = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            rec = record_from_json(obj, f"line {lineno}", require_summary, tokenizer)
            if rec.record_id in seen:
                raise CorpusError(f"line {lineno}: duplicate record_id {rec.record_id!r}")
            seen.add(rec.record_id)
            records.append(rec)
    return records


def dump_corpus(records: Iterable[CorpusRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_json(rec), ensure_ascii=False) + "\n")
