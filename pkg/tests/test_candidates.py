import pytest

from singpair.candidates import (
    Instance,
    LabeledInstance,
    candidate_sentences,
    downsample,
    enumerate_candidates,
    label_candidates,
    pool_multidoc,
    read_instances,
    write_instances,
)
from singpair.corpus import CorpusError, SentenceRef
from singpair.oracle import GroundTruthSet

from conftest import make_doc, make_record


def refs(n, doc="d"):
    return [SentenceRef(doc, i) for i in range(n)]


def gt(primary, secondary=None, index=0):
    r = lambda i: SentenceRef("d", i)  # noqa: E731
    return GroundTruthSet(index, r(primary), r(secondary) if secondary is not None else None, 1 if secondary is None else 2)


@pytest.mark.parametrize("n, total", [(1, 1), (3, 6), (4, 10)])
def test_candidate_counts(n, total):
    cands = enumerate_candidates(refs(n))
    assert len(cands) == total
    assert sum(c.kind == "singleton" for c in cands) == n


def test_enumeration_order_and_errors():
    cands = enumerate_candidates(refs(3))
    assert [c.instance_id for c in cands] == ["d:0", "d:1", "d:2", "d:0+d:1", "d:0+d:2", "d:1+d:2"]
    with pytest.raises(CorpusError):
        enumerate_candidates([])


def test_pair_canonical_order():
    a, b = SentenceRef("d", 1), SentenceRef("d", 2)
    assert Instance.pair(b, a).instance_id == Instance.pair(a, b).instance_id == "d:1+d:2"
    order = {b: 0, a: 1}
    assert Instance.pair(a, b, order).instance_id == "d:2+d:1"
    assert Instance.parse("x:3+y:4") == Instance(SentenceRef("x", 3), SentenceRef("y", 4))
    with pytest.raises(ValueError):
        Instance(a, a)


def test_pool_multidoc():
    docs = [make_doc(f"d{i}", [f"s{j} ." for j in range(8)], f"2004-01-{i + 1:02d}") for i in range(10)]
    pool = pool_multidoc(docs, 5)
    assert len(pool) == 50
    assert len(enumerate_candidates(pool)) == 1275
    small = [make_doc("a", ["x .", "y .", "z ."]), make_doc("b", ["u .", "v .", "w ."])]
    assert len(pool_multidoc(small, 5)) == 6
    assert pool_multidoc([docs[0]], 5) == list(docs[0].sentences[:5])
    with pytest.raises(CorpusError):
        pool_multidoc([])


def test_single_doc_candidates_truncate():
    rec = make_record("r", {"d": [f"s{j} ." for j in range(40)]})
    assert len(candidate_sentences(rec, 30)) == 30
    assert len(candidate_sentences(rec, None)) == 40


def test_labels_exact_set_match():
    r = lambda i: SentenceRef("d", i)  # noqa: E731
    cands = [Instance(r(1), r(2)), Instance(r(5)), Instance(r(1)), Instance.pair(r(2), r(1))]
    labeled = label_candidates(cands, [gt(1, 2), gt(5, index=1)], "q")
    assert [li.label for li in labeled] == [1, 1, 0, 1]
    assert all(li.label == 0 for li in label_candidates(cands, [], "q"))


def synthetic_labels(n_pos, n_neg, kind="singleton", qid="q"):
    out = []
    for i in range(n_pos + n_neg):
        inst = Instance(SentenceRef(qid, i)) if kind == "singleton" else Instance(SentenceRef(qid, i), SentenceRef(qid, 1000 + i))
        out.append(LabeledInstance(inst, int(i < n_pos), qid))
    return out


def test_downsample_counts_and_determinism():
    data = synthetic_labels(2, 50)
    kept = downsample(data, 1, seed=3)
    assert sum(li.label for li in kept) == 2 and len(kept) == 4
    assert downsample(data, 1, seed=3) == kept
    assert downsample(synthetic_labels(0, 10), 1) == []
    with pytest.raises(ValueError):
        downsample(data, 0)


def test_downsample_balances_kinds_separately():
    data = synthetic_labels(1, 20, "singleton") + synthetic_labels(3, 40, "pair")
    kept = downsample(data, 2, seed=0)
    singles = [li for li in kept if li.instance.kind == "singleton"]
    pairs = [li for li in kept if li.instance.kind == "pair"]
    assert len(singles) == 1 + 2 and len(pairs) == 3 + 6
    idx = [data.index(li) for li in kept]
    assert idx == sorted(idx)


def test_downsample_independent_of_other_queries():
    a = synthetic_labels(2, 30, qid="a")
    b = synthetic_labels(2, 30, qid="b")
    alone = downsample(a, 1, seed=9)
    mixed = [li for li in downsample(b + a, 1, seed=9) if li.query_id == "a"]
    assert alone == mixed


def test_instance_file_round_trip(tmp_path):
    data = synthetic_labels(2, 3) + synthetic_labels(1, 1, "pair", "p")
    p = tmp_path / "inst.jsonl"
    write_instances(data, p)
    assert read_instances(p) == data
    p.write_text('{"query_id": "q", "instance_id": "d:0", "kind": "pair", "label": 1}\n')
    with pytest.raises(CorpusError):
        read_instances(p)
