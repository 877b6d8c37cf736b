import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from singpair.candidates import Instance
from singpair.corpus import CorpusError
from singpair.vsm import (
    FEATURE_NAMES,
    IdfTable,
    cosine,
    dense_features,
    document_vector,
    featurize_instance,
    fit_idf,
    instance_vector,
    mean_vector,
    sentence_vector,
)

from conftest import make_doc, make_record


@pytest.fixture
def idf(stopwords):
    recs = [
        make_record("a", {"a": ["storm hits coast .", "storm winds rise ."]}),
        make_record("b", {"b": ["market falls again .", "storm warning issued ."]}),
    ]
    return fit_idf(recs, (1, 1), stopwords)


def test_idf_formula(idf):
    assert idf.doc_count == 2
    assert idf.idf("storm") == pytest.approx(0.0)
    assert idf.idf("coast") == pytest.approx(math.log(2))
    assert idf.idf("never-seen") == pytest.approx(math.log(2))
    with pytest.raises(CorpusError):
        fit_idf([])


def test_idf_monotone_in_df(stopwords):
    t = IdfTable(10, {"a": 1, "b": 3, "c": 10}, (1, 1), stopwords)
    assert t.idf("a") > t.idf("b") > t.idf("c") == 0.0
    with pytest.raises(ValueError):
        IdfTable(2, {"a": 3}, (1, 1), stopwords)


def test_sentence_vectors(idf):
    assert sentence_vector([], idf) == {}
    assert sentence_vector(["the", "coast", "."], idf) == pytest.approx({"coast": math.log(2)})
    assert sentence_vector(["coast", "coast"], idf)["coast"] == pytest.approx(2 * math.log(2))


def test_bigrams_skip_stopword_only_grams(stopwords):
    recs = [make_record("a", {"a": ["the red fox of the hill"]}), make_record("b", {"b": ["blue"]})]
    t = fit_idf(recs, (1, 2), stopwords)
    v = sentence_vector(["the", "red", "fox", "of", "the", "hill"], t)
    assert "red fox" in v and "the red" in v and "of the" not in v and "the" not in v


def test_document_and_instance_vectors(idf):
    doc = make_doc("a", ["coast winds .", "market falls ."])
    s0, s1 = (sentence_vector(s, idf) for s in doc.sentences)
    assert document_vector(make_doc("x", ["coast winds ."]), idf) == s0
    dv = document_vector(doc, idf)
    assert dv == pytest.approx({k: v / 2 for k, v in {**s0, **s1}.items()})
    lookup = {s.ref: s for s in doc.sentences}
    a, b = doc.sentences[0].ref, doc.sentences[1].ref
    assert instance_vector(Instance(a), idf, lookup) == s0
    assert instance_vector(Instance(a, b), idf, lookup) == pytest.approx(dv)
    twin = make_doc("t", ["coast winds .", "coast winds ."])
    tl = {s.ref: s for s in twin.sentences}
    assert instance_vector(Instance(*[s.ref for s in twin.sentences]), idf, tl) == pytest.approx(s0)
    with pytest.raises(CorpusError):
        document_vector(make_doc("e", []), idf)


def test_cosine_examples():
    assert cosine({"x": 2.0}, {"x": 2.0}) == pytest.approx(1.0)
    assert cosine({"x": 1.0}, {"y": 1.0}) == 0.0
    assert cosine({"x": 1.0}, {"x": 1.0, "y": 1.0}) == pytest.approx(1 / math.sqrt(2))
    assert cosine({}, {"x": 1.0}) == 0.0


weights = st.dictionaries(st.sampled_from("abcdef"), st.floats(0.01, 100), max_size=6)


@given(weights, weights, st.floats(0.1, 10))
def test_cosine_properties(a, b, k):
    c = cosine(a, b)
    assert 0.0 <= c <= 1.0
    assert c == pytest.approx(cosine(b, a))
    assert cosine({g: k * w for g, w in a.items()}, b) == pytest.approx(c)
    if a:
        assert cosine(a, a) == pytest.approx(1.0)


def test_mean_vector_drops_nothing_positive():
    assert mean_vector([{"a": 1.0}, {"b": 3.0}]) == {"a": 0.5, "b": 1.5}
    assert mean_vector([]) == {}


def test_featurize_positions_and_centrality(idf):
    doc = make_doc("d", [f"coast item{i} ." for i in range(10)])
    lookup = {s.ref: s for s in doc.sentences}
    dv = document_vector(doc, idf)
    first = doc.sentences[0].ref
    f = featurize_instance(Instance(first), dv, idf, 10, lookup)
    assert f.position_first == f.position_second == 0.0 and f.kind_flag == 0
    f = featurize_instance(Instance(first, doc.sentences[9].ref), dv, idf, {"d": 10}, lookup)
    assert (f.position_first, f.position_second, f.kind_flag) == (0.0, 1.0, 1)
    own = instance_vector(Instance(first), idf, lookup)
    assert featurize_instance(Instance(first), own, idf, 10, lookup).centrality == pytest.approx(1.0)


def test_dense_features_layout(idf):
    doc = make_doc("d", ["coast market winds falls ."])
    lookup = {s.ref: s for s in doc.sentences}
    ref = doc.sentences[0].ref
    f = featurize_instance(Instance(ref), document_vector(doc, idf), idf, 1, lookup)
    row = dense_features(f)
    assert row.shape == (len(FEATURE_NAMES),) == (27,)
    ws = sorted(f.vector.values(), reverse=True)
    assert row[4] == pytest.approx(sum(ws)) and row[5] == pytest.approx(sum(ws) / len(ws))
    assert np.allclose(row[6 : 6 + len(ws)], ws) and not row[6 + len(ws) : 26].any()
    assert row[26] == 4
