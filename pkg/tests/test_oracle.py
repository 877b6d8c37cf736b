import pytest

from singpair.corpus import CorpusError, SentenceRef
from singpair.oracle import (
    GroundTruthSet,
    OracleConfig,
    corpus_statistics,
    derive_all,
    derive_ground_truth,
    read_oracle,
    remove_overlap,
    write_oracle,
)
from singpair.rouge import rouge_average
from singpair.textproc import tokenize

from conftest import make_doc, make_record

D1 = "pakistan denies its spy agency helped plan the attack"
D2 = "the bombing killed 58 people"
SUMMARY = "pakistan denies its spy agency helped plan bombing that killed 58"


def test_remove_overlap():
    assert remove_overlap(["a", "b", "c", "b"], ["b", "d"]) == ["a", "c"]
    assert remove_overlap(["a", "b"], ["x"]) == ["a", "b"]
    assert remove_overlap(["a", "b"], ["b", "a"]) == []
    assert remove_overlap(["running"], ["run"], stemming=True) == []


def test_pair_example(stopwords):
    doc = make_doc("d", [D1, D2])
    gt = derive_ground_truth(doc, tokenize(SUMMARY), stopwords)
    assert gt == GroundTruthSet(0, SentenceRef("d", 0), SentenceRef("d", 1), 2)


def test_unmatchable_summary_gives_nothing(stopwords):
    doc = make_doc("d", [D1, D2])
    assert derive_ground_truth(doc, tokenize("zebras yawn loudly"), stopwords) is None


def test_verbatim_sentence_is_singleton(stopwords):
    doc = make_doc("d", [D2, D1, "an unrelated line about weather"])
    gt = derive_ground_truth(doc, tokenize(D1), stopwords)
    assert gt == GroundTruthSet(0, SentenceRef("d", 1), None, 1)


def test_one_shared_word_is_not_enough(stopwords):
    # the only source shares a single content word, so nothing is eligible
    doc = make_doc("d", ["bombing in the north"])
    assert derive_ground_truth(doc, tokenize("bombing denied by officials"), stopwords) is None


def test_ties_prefer_earlier_sentence(stopwords):
    doc = make_doc("d", ["alpha beta gamma", "alpha beta gamma"])
    gt = derive_ground_truth(doc, tokenize("alpha beta gamma"), stopwords)
    assert gt.primary == SentenceRef("d", 0) and gt.secondary is None


def test_primary_is_first_argmax(stopwords):
    texts = [D2, D1, "spy agency officials met in the capital", "58 people died in the bombing"]
    doc = make_doc("d", texts)
    summ = tokenize(SUMMARY)
    gt = derive_ground_truth(doc, summ, stopwords)
    sims = [rouge_average(s.tokens, summ) for s in doc.sentences]
    assert gt.primary == doc.sentences[max(range(len(sims)), key=lambda i: (sims[i], -i))].ref


def test_three_way_fusion_counts_raw_size(stopwords):
    doc = make_doc("d", ["red fox jumps", "lazy dog sleeps", "bright moon rises"])
    gt = derive_ground_truth(doc, tokenize("red fox jumps lazy dog sleeps bright moon rises"), stopwords)
    assert gt.raw_size == 3 and gt.secondary is not None


def test_ground_truth_set_invariants():
    a, b = SentenceRef("d", 0), SentenceRef("d", 1)
    with pytest.raises(ValueError):
        GroundTruthSet(0, a, a, 2)
    with pytest.raises(ValueError):
        GroundTruthSet(0, a, None, 2)
    with pytest.raises(ValueError):
        GroundTruthSet(0, a, b, 1)


def test_derive_all_drops_empty_and_records_index(stopwords):
    rec = make_record("r", {"d": [D1, D2]}, [D1, "zebras yawn loudly", D2])
    sets = derive_all(rec, stopwords)
    assert [s.summary_index for s in sets] == [0, 2]
    with pytest.raises(CorpusError):
        derive_all(make_record("r", {"d": [D1]}), stopwords)


def test_multidoc_sets_span_documents(stopwords):
    docs = [make_doc("a", [D1], "2004-01-01"), make_doc("b", [D2], "2004-01-02")]
    rec = make_record("r", docs, [SUMMARY])
    (gt,) = derive_all(rec, stopwords)
    assert {gt.primary.doc_id, gt.secondary.doc_id} == {"a", "b"}


def test_stats_forced_cases(stopwords):
    copies = [make_record(f"r{i}", {"d": [D1, D2]}, [D1, D2]) for i in range(3)]
    st = corpus_statistics(copies, stopwords)
    assert st.size_histogram == {1: 1.0}
    assert st.fusion_rate_by_summary_position == {0: 0.0, 1: 0.0}
    fused = [make_record("f", {"d": [D1, D2]}, [SUMMARY])]
    st = corpus_statistics(fused, stopwords)
    assert st.size_histogram == {2: 1.0} and st.fusion_rate_by_summary_position == {0: 1.0}
    with pytest.raises(CorpusError):
        corpus_statistics([], stopwords)


def test_stats_histograms_sum_to_one(stopwords):
    recs = [
        make_record("a", {"d": [D1, D2, "weather was mild"]}, [SUMMARY, "zebras yawn", D2]),
        make_record("b", {"d": [D2, D1]}, [D1]),
    ]
    st = corpus_statistics(recs, stopwords)
    for h in (st.size_histogram, st.primary_position_histogram, st.secondary_position_histogram):
        assert sum(h.values()) == pytest.approx(1.0, abs=1e-9)
    assert st.empty_fraction == pytest.approx(0.25)
    assert st.num_summary_sentences == 4


def test_oracle_file_round_trip(tmp_path, stopwords):
    rec = make_record("r", {"d": [D1, D2]}, [SUMMARY, D2])
    sets = derive_all(rec, stopwords, OracleConfig())
    p = tmp_path / "gt.jsonl"
    write_oracle([("r", sets)], p)
    assert read_oracle(p) == {"r": sets}
