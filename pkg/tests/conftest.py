from pathlib import Path

import pytest

from singpair.corpus import CorpusRecord, Document, ReferenceSummary
from singpair.textproc import default_stopwords

DATA = Path(__file__).parent / "data"
ROOT = Path(__file__).parent.parent


@pytest.fixture(scope="session")
def stopwords():
    return default_stopwords()


def make_doc(doc_id, texts, date=None):
    return Document.from_texts(doc_id, texts, date)


def make_record(record_id, docs, summary=None, extra=None):
    """Build a record from ``{doc_id: [texts]}`` or a list of Documents."""
    if isinstance(docs, dict):
        docs = [make_doc(d, t) for d, t in docs.items()]
    ref = ReferenceSummary.from_texts(summary) if summary else None
    extra = tuple(ReferenceSummary.from_texts(e) for e in extra or ())
    return CorpusRecord(record_id, tuple(docs), ref, extra)


def separable_queries(n_queries, n_items=30, width=5, seed=0, prefix="q"):
    """Ranking queries where feature 0 alone separates positives (>= 0.6)
    from negatives (<= 0.5); other features are noise."""
    import numpy as np

    rng = np.random.default_rng(seed)
    queries = {}
    for q in range(n_queries):
        n_pos = int(rng.integers(1, 6))
        items = []
        for i in range(n_items):
            label = int(i < n_pos)
            x = rng.uniform(0, 1, width)
            x[0] = rng.uniform(0.6, 1.0) if label else rng.uniform(0.0, 0.5)
            items.append((x, label))
        order = rng.permutation(n_items)
        queries[f"{prefix}{q}"] = [items[i] for i in order]
    return queries
