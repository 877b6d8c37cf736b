"""LambdaMART over query-grouped instances, NDCG, model and score-file I/O."""

from __future__ import annotations

import csv
import json
import logging
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "RankerError",
    "RankingDataset",
    "RegressionTree",
    "LambdaMartModel",
    "TrainConfig",
    "fit_regression_tree",
    "compute_lambdas",
    "train_lambdamart",
    "predict_scores",
    "ndcg_at_k",
    "mean_ndcg",
    "save_model",
    "load_model",
    "load_external_scores",
    "write_scores",
    "MODEL_VERSION",
]

logger = logging.getLogger(__name__)

MODEL_VERSION = 1
MODEL_FORMAT = "singpair-lambdamart"


class RankerError(ValueError):
    pass


@dataclass
class RankingDataset:
    """Rows grouped by query; rows of one query are contiguous."""

    features: np.ndarray
    labels: np.ndarray
    query_ids: list[str]
    boundaries: np.ndarray  # len(query_ids) + 1 offsets into the rows

    @classmethod
    def from_queries(cls, queries: Mapping[str, Sequence[tuple[Sequence[float], int]]]) -> "RankingDataset":
        feats, labels, qids, bounds = [], [], [], [0]
        for qid, items in queries.items():
            if not items:
                raise RankerError(f"query {qid!r} has no items")
            for x, y in items:
                feats.append(np.asarray(x, dtype=np.float64))
                labels.append(int(y))
            qids.append(qid)
            bounds.append(len(labels))
        if not feats:
            raise RankerError("empty ranking dataset")
        widths = {len(f) for f in feats}
        if len(widths) != 1:
            raise RankerError(f"feature vectors have mixed widths {sorted(widths)}")
        return cls(np.vstack(feats), np.asarray(labels, dtype=np.int64), qids, np.asarray(bounds))

    @classmethod
    def from_rows(cls, features: np.ndarray, labels: Sequence[int], query_ids: Sequence[str]) -> "RankingDataset":
        """Group row-aligned arrays by query id (first-seen order)."""
        groups: dict[str, list[tuple[np.ndarray, int]]] = {}
        for x, y, q in zip(features, labels, query_ids):
            groups.setdefault(q, []).append((x, int(y)))
        return cls.from_queries(groups)

    @property
    def width(self) -> int:
        return self.features.shape[1]

    def query_slices(self):
        for q, (a, b) in enumerate(zip(self.boundaries[:-1], self.boundaries[1:])):
            yield q, slice(int(a), int(b))


# --------------------------------------------------------------------------
# regression trees


@dataclass
class RegressionTree:
    """Binary tree stored as flat node arrays; ``feature == -1`` marks a leaf.
    Rows with ``x[feature] <= threshold`` go left."""

    feature: list[int]
    threshold: list[float]
    left: list[int]
    right: list[int]
    value: list[float]

    @property
    def n_leaves(self) -> int:
        return sum(1 for f in self.feature if f < 0)

    def predict(self, X: np.ndarray) -> np.ndarray:
        feature = np.asarray(self.feature)
        threshold = np.asarray(self.threshold)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        while True:
            f = feature[node]
            active = f >= 0
            if not active.any():
                break
            r, n, fa = rows[active], node[active], f[active]
            go_left = X[r, fa] <= threshold[n]
            node[active] = np.where(go_left, left[n], right[n])
        return np.asarray(self.value)[node]

    def to_json(self) -> dict:
        nodes = []
        for i, f in enumerate(self.feature):
            if f < 0:
                nodes.append({"value": self.value[i]})
            else:
                nodes.append(
                    {"feature": f, "threshold": self.threshold[i], "left": self.left[i], "right": self.right[i]}
                )
        return {"nodes": nodes}

    @classmethod
    def from_json(cls, obj: dict) -> "RegressionTree":
        t = cls([], [], [], [], [])
        nodes = obj["nodes"]
        for nd in nodes:
            if "value" in nd:
                t.feature.append(-1)
                t.threshold.append(0.0)
                t.left.append(-1)
                t.right.append(-1)
                t.value.append(float(nd["value"]))
            else:
                left, right = int(nd["left"]), int(nd["right"])
                if not (0 < left < len(nodes) and 0 < right < len(nodes)):
                    raise RankerError("tree node points outside the tree")
                t.feature.append(int(nd["feature"]))
                t.threshold.append(float(nd["threshold"]))
                t.left.append(left)
                t.right.append(right)
                t.value.append(0.0)
        if not nodes:
            raise RankerError("tree has no nodes")
        return t


def _best_split(X, g, idx, sorted_cols, in_node, min_leaf):
    """Best least-squares split of rows ``idx``; returns (gain, feature, threshold)."""
    n = idx.size
    if n < 2 * min_leaf:
        return None
    total = g[idx].sum()
    base = total * total / n
    best = None
    for f, col_order in enumerate(sorted_cols):
        order = col_order[in_node[col_order]]
        xs = X[order, f]
        if xs[0] == xs[-1]:
            continue
        cs = np.cumsum(g[order])[:-1]
        n_left = np.arange(1, n)
        valid = (xs[:-1] < xs[1:]) & (n_left >= min_leaf) & (n - n_left >= min_leaf)
        if not valid.any():
            continue
        gains = cs * cs / n_left + (total - cs) ** 2 / (n - n_left) - base
        gains = np.where(valid, gains, -np.inf)
        k = int(np.argmax(gains))
        if best is None or gains[k] > best[0]:
            best = (float(gains[k]), f, float((xs[k] + xs[k + 1]) / 2.0))
    return best


def fit_regression_tree(
    X: np.ndarray,
    gradients: np.ndarray,
    hessians: np.ndarray,
    max_leaves: int = 10,
    min_samples_leaf: int = 1,
    sorted_cols: Sequence[np.ndarray] | None = None,
) -> RegressionTree:
    """Grow best-first to ``max_leaves`` on squared error of ``gradients``;
    leaf outputs are Newton steps sum(g) / sum(h)."""
    n = X.shape[0]
    if sorted_cols is None:
        sorted_cols = [np.argsort(X[:, f], kind="stable") for f in range(X.shape[1])]
    tree = RegressionTree([-1], [0.0], [-1], [-1], [0.0])
    leaves: dict[int, np.ndarray] = {0: np.arange(n)}
    in_node = np.zeros(n, dtype=bool)

    def split_of(idx):
        in_node[:] = False
        in_node[idx] = True
        return _best_split(X, gradients, idx, sorted_cols, in_node, min_samples_leaf)

    candidates = {0: split_of(leaves[0])}
    while len(leaves) < max_leaves:
        ready = [(s[0], node) for node, s in candidates.items() if s is not None and s[0] > 1e-12]
        if not ready:
            break
        # largest gain first; lowest node id on ties
        _, node = max(ready, key=lambda t: (t[0], -t[1]))
        _, f, thr = candidates.pop(node)
        idx = leaves.pop(node)
        go_left = X[idx, f] <= thr
        for side, rows in (("left", idx[go_left]), ("right", idx[~go_left])):
            child = len(tree.feature)
            tree.feature.append(-1)
            tree.threshold.append(0.0)
            tree.left.append(-1)
            tree.right.append(-1)
            tree.value.append(0.0)
            getattr(tree, side)[node] = child
            leaves[child] = rows
            candidates[child] = split_of(rows)
        tree.feature[node] = f
        tree.threshold[node] = thr

    for node, idx in leaves.items():
        h = hessians[idx].sum()
        tree.value[node] = float(gradients[idx].sum() / h) if h > 1e-12 else 0.0
    return tree


# --------------------------------------------------------------------------
# model


@dataclass(frozen=True)
class TrainConfig:
    num_trees: int = 300
    learning_rate: float = 0.1
    max_leaves: int = 10
    min_samples_leaf: int = 1
    ndcg_k: int = 10
    seed: int = 0
    query_subsample: float = 1.0

    def __post_init__(self) -> None:
        if self.num_trees < 0 or self.max_leaves < 2 or self.min_samples_leaf < 1 or self.ndcg_k < 1:
            raise RankerError("tree counts and sizes must be positive")
        if not self.learning_rate > 0:
            raise RankerError("learning_rate must be > 0")
        if not 0 < self.query_subsample <= 1:
            raise RankerError("query_subsample must be in (0, 1]")


@dataclass
class LambdaMartModel:
    feature_width: int
    learning_rate: float
    trees: list[RegressionTree] = field(default_factory=list)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[0] and X.shape[1] != self.feature_width:
            raise RankerError(f"feature width {X.shape[1]} != model width {self.feature_width}")
        out = np.zeros(X.shape[0])
        for t in self.trees:
            out += self.learning_rate * t.predict(X)
        return out

    def to_json(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "feature_width": self.feature_width,
            "learning_rate": self.learning_rate,
            "trees": [t.to_json() for t in self.trees],
        }


def predict_scores(model: LambdaMartModel, features) -> list[float]:
    X = np.asarray(features, dtype=np.float64)
    if X.size == 0:
        return []
    return model.predict(X).tolist()


def _ideal_dcg(labels: np.ndarray, k: int) -> float:
    gains = np.sort(2.0 ** labels - 1.0)[::-1][:k]
    return float((gains / np.log2(np.arange(2, gains.size + 2))).sum())


def compute_lambdas(scores: np.ndarray, labels: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """LambdaRank gradients and second derivatives for one query.

    Each pair (i, j) with label_i > label_j pushes i up by
    |dNDCG@k| * rho and j down by the same amount, rho = 1/(1+exp(s_i - s_j)).
    """
    n = scores.size
    idcg = _ideal_dcg(labels, k)
    if idcg <= 0:
        return np.zeros(n), np.zeros(n)
    order = np.argsort(-scores, kind="stable")
    ranks = np.empty(n, dtype=np.int64)
    ranks[order] = np.arange(n)
    disc = np.where(ranks < k, 1.0 / np.log2(ranks + 2.0), 0.0)
    gain = 2.0 ** labels - 1.0
    better = labels[:, None] > labels[None, :]
    delta = np.abs((gain[:, None] - gain[None, :]) * (disc[:, None] - disc[None, :])) / idcg
    diff = np.clip(scores[:, None] - scores[None, :], -50.0, 50.0)
    rho = 1.0 / (1.0 + np.exp(diff))
    lam = np.where(better, delta * rho, 0.0)
    hess = np.where(better, delta * rho * (1.0 - rho), 0.0)
    return lam.sum(axis=1) - lam.sum(axis=0), hess.sum(axis=1) + hess.sum(axis=0)


def ndcg_at_k(scores: Sequence[float], labels: Sequence[int], k: int = 10) -> float:
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if s.shape != y.shape:
        raise RankerError("scores and labels differ in length")
    if k < 1:
        raise RankerError("k must be >= 1")
    idcg = _ideal_dcg(y, k)
    if idcg <= 0:
        return 0.0
    top = np.argsort(-s, kind="stable")[:k]
    dcg = ((2.0 ** y[top] - 1.0) / np.log2(np.arange(2, top.size + 2))).sum()
    return float(dcg / idcg)


def mean_ndcg(model: LambdaMartModel, data: RankingDataset, k: int = 10) -> float:
    scores = model.predict(data.features)
    vals = [ndcg_at_k(scores[sl], data.labels[sl], k) for _, sl in data.query_slices()]
    return float(np.mean(vals)) if vals else 0.0


def train_lambdamart(data: RankingDataset, config: TrainConfig = TrainConfig()) -> LambdaMartModel:
    usable = [
        sl for _, sl in data.query_slices() if data.labels[sl].min() != data.labels[sl].max()
    ]
    if not usable:
        raise RankerError("degenerate dataset: no query mixes positive and negative labels")
    rows = np.concatenate([np.arange(sl.start, sl.stop) for sl in usable])
    X = data.features[rows]
    y = data.labels[rows].astype(np.float64)
    local, start = [], 0
    for sl in usable:
        local.append(slice(start, start + sl.stop - sl.start))
        start += sl.stop - sl.start

    sorted_cols = [np.argsort(X[:, f], kind="stable") for f in range(X.shape[1])]
    model = LambdaMartModel(data.width, config.learning_rate)
    scores = np.zeros(X.shape[0])
    rng = random.Random(config.seed)
    for it in range(config.num_trees):
        lambdas = np.zeros_like(scores)
        hessians = np.zeros_like(scores)
        if config.query_subsample < 1.0:
            m = max(1, round(config.query_subsample * len(local)))
            active = sorted(rng.sample(range(len(local)), m))
        else:
            active = range(len(local))
        for q in active:
            sl = local[q]
            lambdas[sl], hessians[sl] = compute_lambdas(scores[sl], y[sl], config.ndcg_k)
        tree = fit_regression_tree(
            X, lambdas, hessians, config.max_leaves, config.min_samples_leaf, sorted_cols
        )
        model.trees.append(tree)
        scores += config.learning_rate * tree.predict(X)
        if logger.isEnabledFor(logging.DEBUG) and (it + 1) % 50 == 0:
            ndcg = np.mean([ndcg_at_k(scores[sl], y[sl], config.ndcg_k) for sl in local])
            logger.debug("tree %d: train NDCG@%d = %.4f", it + 1, config.ndcg_k, ndcg)
    return model


# --------------------------------------------------------------------------
# files


def save_model(model: LambdaMartModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_json(), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_model(path: str | Path) -> LambdaMartModel:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise RankerError(f"{path}: not a valid model file ({exc.msg})") from exc
    if not isinstance(obj, dict) or obj.get("format") != MODEL_FORMAT:
        raise RankerError(f"{path}: not a {MODEL_FORMAT} model")
    if obj.get("version") != MODEL_VERSION:
        raise RankerError(f"{path}: unsupported version {obj.get('version')!r}")
    try:
        model = LambdaMartModel(int(obj["feature_width"]), float(obj["learning_rate"]))
        model.trees = [RegressionTree.from_json(t) for t in obj["trees"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise RankerError(f"{path}: malformed model ({exc})") from exc
    for t in model.trees:
        if any(f >= model.feature_width for f in t.feature):
            raise RankerError(f"{path}: split on feature beyond feature_width")
    return model


def load_external_scores(path: str | Path) -> dict[tuple[str, str], float]:
    """Read ``query_id<TAB>instance_id<TAB>score`` lines."""
    out: dict[tuple[str, str], float] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), 1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise RankerError(f"{path}:{lineno}: expected 3 tab-separated fields")
            qid, iid, raw = row
            try:
                score = float(raw)
            except ValueError:
                raise RankerError(f"{path}:{lineno}: non-numeric score {raw!r}") from None
            if not math.isfinite(score):
                raise RankerError(f"{path}:{lineno}: non-finite score {raw!r}")
            key = (qid, iid)
            if key in out:
                raise RankerError(f"{path}:{lineno}: duplicate key {qid}/{iid}")
            out[key] = score
    return out


def write_scores(scores: Mapping[tuple[str, str], float] | Sequence[tuple[str, str, float]], path) -> None:
    items = scores.items() if isinstance(scores, Mapping) else (((q, i), s) for q, i, s in scores)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        for (qid, iid), s in items:
            w.writerow([qid, iid, repr(float(s))])
