import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from singpair.ranker import (
    LambdaMartModel,
    RankerError,
    RankingDataset,
    RegressionTree,
    TrainConfig,
    compute_lambdas,
    load_external_scores,
    load_model,
    mean_ndcg,
    ndcg_at_k,
    predict_scores,
    save_model,
    train_lambdamart,
    write_scores,
)

from conftest import separable_queries


def test_ndcg_examples():
    assert ndcg_at_k([2.0, 1.0], [1, 0], 2) == 1.0
    assert ndcg_at_k([2.0, 1.0], [0, 1], 2) == pytest.approx(1 / math.log2(3))
    assert ndcg_at_k([1.0, 2.0], [0, 0], 2) == 0.0
    with pytest.raises(RankerError):
        ndcg_at_k([1.0], [1, 0])


def test_ndcg_ties_follow_input_order():
    assert ndcg_at_k([1.0, 1.0], [1, 0], 1) == 1.0
    assert ndcg_at_k([1.0, 1.0], [0, 1], 1) == 0.0


scores_labels = st.lists(st.tuples(st.floats(-5, 5), st.integers(0, 1)), min_size=1, max_size=15)


@given(st.lists(st.tuples(st.integers(-50, 50), st.integers(0, 1)), min_size=1, max_size=15), st.integers(1, 10))
def test_ndcg_monotone_invariance(items, k):
    # integer scores keep both transforms exact, so ties stay ties
    s = np.array([x for x, _ in items], dtype=float)
    y = [l for _, l in items]
    base = ndcg_at_k(s, y, k)
    assert ndcg_at_k(3 * s + 7, y, k) == base
    assert ndcg_at_k(s**3, y, k) == base


@given(scores_labels, st.integers(1, 10))
def test_lambdas_balance(items, k):
    s = np.array([x for x, _ in items])
    y = np.array([l for _, l in items], dtype=float)
    lam, hess = compute_lambdas(s, y, k)
    # every pair pushes its members by equal and opposite amounts
    assert lam.sum() == pytest.approx(0.0, abs=1e-9)
    assert (hess >= 0).all()
    assert (lam[y == 1] >= -1e-12).all() and (lam[y == 0] <= 1e-12).all()


def test_lambdas_pair_example():
    lam, _ = compute_lambdas(np.array([0.0, 0.0]), np.array([1.0, 0.0]), 10)
    assert lam[0] == pytest.approx(-lam[1]) and lam[0] > 0


def test_one_query_one_tree_orders_pair():
    data = RankingDataset.from_queries({"q": [([0.0], 0), ([1.0], 1)]})
    model = train_lambdamart(data, TrainConfig(num_trees=1))
    s = model.predict(data.features)
    assert s[1] > s[0]


def test_degenerate_dataset():
    data = RankingDataset.from_queries({"q": [([0.0], 0), ([1.0], 0)], "r": [([2.0], 1)]})
    with pytest.raises(RankerError, match="degenerate"):
        train_lambdamart(data)


def test_dataset_validation():
    with pytest.raises(RankerError):
        RankingDataset.from_queries({"q": []})
    with pytest.raises(RankerError):
        RankingDataset.from_queries({"q": [([0.0], 0), ([0.0, 1.0], 1)]})


def test_tree_walk_by_hand():
    # x0 <= 0.5 -> leaf 1.0; else (x1 <= 2 -> 2.0, else 3.0)
    tree = RegressionTree([0, -1, 1, -1, -1], [0.5, 0, 2.0, 0, 0], [1, -1, 3, -1, -1], [2, -1, 4, -1, -1], [0, 1.0, 0, 2.0, 3.0])
    model = LambdaMartModel(2, 0.5, [tree])
    X = [[0.2, 9.0], [0.7, 1.0], [0.7, 5.0], [0.5, 0.0]]
    assert predict_scores(model, X) == [0.5, 1.0, 1.5, 0.5]
    assert predict_scores(model, X[::-1]) == [0.5, 1.5, 1.0, 0.5]
    assert predict_scores(LambdaMartModel(2, 0.1), X) == [0.0] * 4
    with pytest.raises(RankerError):
        model.predict(np.zeros((1, 3)))


def test_training_improves_and_generalizes():
    train = RankingDataset.from_queries(separable_queries(30, seed=1))
    held = RankingDataset.from_queries(separable_queries(10, seed=2))
    one = train_lambdamart(train, TrainConfig(num_trees=1))
    many = train_lambdamart(train, TrainConfig(num_trees=30))
    assert mean_ndcg(many, train, 10) >= mean_ndcg(one, train, 10)
    assert mean_ndcg(many, held, 5) == 1.0
    assert all(t.n_leaves <= 10 for t in many.trees)


def test_query_subsample_is_seeded():
    data = RankingDataset.from_queries(separable_queries(10, seed=3))
    cfg = TrainConfig(num_trees=5, query_subsample=0.5, seed=4)
    assert train_lambdamart(data, cfg).to_json() == train_lambdamart(data, cfg).to_json()


def test_model_round_trip(tmp_path):
    data = RankingDataset.from_queries(separable_queries(8, width=3, seed=5))
    model = train_lambdamart(data, TrainConfig(num_trees=10))
    p = tmp_path / "m.json"
    save_model(model, p)
    back = load_model(p)
    X = np.random.default_rng(0).uniform(0, 1, (100, 3))
    assert np.array_equal(back.predict(X), model.predict(X))
    save_model(back, tmp_path / "m2.json")
    assert (tmp_path / "m2.json").read_bytes() == p.read_bytes()


def test_model_file_errors(tmp_path):
    data = RankingDataset.from_queries(separable_queries(4, width=2, seed=6))
    p = tmp_path / "m.json"
    save_model(train_lambdamart(data, TrainConfig(num_trees=2)), p)
    text = p.read_text()
    (tmp_path / "cut.json").write_text(text[: len(text) // 2])
    with pytest.raises(RankerError):
        load_model(tmp_path / "cut.json")
    obj = json.loads(text)
    obj["version"] += 1
    (tmp_path / "v.json").write_text(json.dumps(obj))
    with pytest.raises(RankerError, match="unsupported version"):
        load_model(tmp_path / "v.json")


def test_external_scores(tmp_path):
    p = tmp_path / "s.tsv"
    write_scores({("q", "d:0"): 0.5, ("q", "d:0+d:1"): -1.25, ("r", "x:3"): 1e-9}, p)
    got = load_external_scores(p)
    assert got == {("q", "d:0"): 0.5, ("q", "d:0+d:1"): -1.25, ("r", "x:3"): 1e-9}
    p.write_text("q\td:0\t1\nq\td:0\t2\n")
    with pytest.raises(RankerError, match="duplicate"):
        load_external_scores(p)
    p.write_text("q\td:0\tabc\n")
    with pytest.raises(RankerError, match="non-numeric"):
        load_external_scores(p)
