"""Seeded synthetic news-like corpora with known compression/fusion structure.

Documents mix stopwords, Zipf-distributed background words and a handful of
per-record topic words. Summary sentences are built from source sentences
favoured by position and topicality:

* ``single``: a compression of one source sentence
* ``pair``: pieces of two source sentences
* ``triple``: pieces of three source sentences
* ``novel``: words never seen in the document

Usage: ``python -m singpair.synthetic OUT.jsonl --records 100 --mix cnndm``
"""

from __future__ import annotations

import argparse
import json
import random
from itertools import product
from typing import Sequence

from .textproc import default_stopwords

MIXES = {
    # share of summary sentences per construction, roughly CNN/DM-like
    "cnndm": {"single": 0.45, "pair": 0.33, "triple": 0.16, "novel": 0.06},
    # mostly fused pairs, for end-to-end selection checks
    "fusion": {"single": 0.35, "pair": 0.65, "triple": 0.0, "novel": 0.0},
}

_ONSETS = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "dr", "gr", "st", "tr", "pl"]
_NUCLEI = ["a", "e", "i", "o", "u", "ai", "ou"]
_CODAS = ["", "n", "r", "s", "l", "k"]


def _syllables() -> list[str]:
    return [o + n + c for o, n, c in product(_ONSETS, _NUCLEI, _CODAS)]


def make_vocabulary(seed: int = 0) -> dict[str, list[str]]:
    """Disjoint pseudo-word pools: background, topic and novel words."""
    rng = random.Random(seed)
    syl = _syllables()
    stop = default_stopwords()
    words: list[str] = []
    seen: set[str] = set()
    while len(words) < 6000:
        w = "".join(rng.choice(syl) for _ in range(rng.choice((2, 2, 3))))
        if w in seen or w in stop or len(w) < 4:
            continue
        seen.add(w)
        words.append(w)
    return {"background": words[:3000], "topic": words[3000:5000], "novel": words[5000:]}


class _Generator:
    def __init__(self, seed: int, mix: dict[str, float]) -> None:
        self.rng = random.Random(seed)
        vocab = make_vocabulary(seed)
        self.background = vocab["background"]
        self.topic_pool = vocab["topic"]
        self.novel = vocab["novel"]
        self.stop = sorted(default_stopwords().words)
        ranks = range(1, len(self.background) + 1)
        self.bg_weights = [1.0 / r for r in ranks]
        self.mix = mix

    def background_word(self) -> str:
        return self.rng.choices(self.background, self.bg_weights)[0]

    def sentence(self, topics: Sequence[str], n_topic: int) -> list[str]:
        rng = self.rng
        length = rng.randint(14, 26)
        n_topic = min(n_topic, length // 3)
        toks = []
        for _ in range(length - n_topic):
            toks.append(rng.choice(self.stop) if rng.random() < 0.4 else self.background_word())
        for _ in range(n_topic):
            toks.insert(rng.randrange(len(toks) + 1), rng.choice(topics))
        return toks

    def document(self, n_sent: int, topics: Sequence[str]) -> tuple[list[list[str]], list[float]]:
        """Sentences plus a per-sentence salience weight used to pick sources."""
        sents, weights = [], []
        for i in range(n_sent):
            lead = 1.0 / (1.0 + 0.35 * i)
            salient = self.rng.random() < 0.35 + 0.5 * lead
            sents.append(self.sentence(topics, self.rng.randint(3, 5) if salient else self.rng.randint(0, 1)))
            weights.append(lead * (4.0 if salient else 0.3))
        return sents, weights

    def _piece(self, src: Sequence[str], keep: float, start: float = 0.0, stop: float = 1.0) -> list[str]:
        lo, hi = int(len(src) * start), max(int(len(src) * start) + 3, int(len(src) * stop))
        return [t for t in src[lo:hi] if self.rng.random() < keep]

    def summary_sentence(self, kind: str, sents, weights, used: set[int]) -> list[str]:
        rng = self.rng
        pool = [i for i in range(len(sents)) if i not in used]
        k = {"single": 1, "pair": 2, "triple": 3}.get(kind, 0)
        if k == 0 or len(pool) < k:
            return [rng.choice(self.novel) for _ in range(rng.randint(6, 10))]
        srcs: list[int] = []
        while len(srcs) < k:
            i = rng.choices(pool, [weights[j] for j in pool])[0]
            if i not in srcs:
                srcs.append(i)
        used.update(srcs)
        srcs.sort()
        if k == 1:
            out = self._piece(sents[srcs[0]], 0.8)
        else:
            out = []
            for n, i in enumerate(srcs):
                share = 0.6 if n == 0 else 0.5
                out += self._piece(sents[i], 0.85, 0.0, share)
        # a little novel wording in every summary sentence
        for _ in range(rng.randint(0, 2)):
            out.insert(rng.randrange(len(out) + 1), rng.choice(self.novel))
        return out

    def record(self, rid: str, n_docs: int = 1) -> dict:
        rng = self.rng
        topics = rng.sample(self.topic_pool, 8)
        docs = []
        all_sents, all_weights = [], []
        for d in range(n_docs):
            sents, weights = self.document(rng.randint(20, 35), topics)
            date = f"2004-{1 + d // 28:02d}-{1 + d % 28:02d}" if n_docs > 1 else None
            docs.append({"doc_id": f"{rid}-d{d}", "date": date, "sentences": [_text(s) for s in sents]})
            all_sents += sents
            all_weights += weights
        kinds = list(self.mix)
        used: set[int] = set()
        summary = []
        for _ in range(rng.randint(3, 4)):
            kind = rng.choices(kinds, [self.mix[k] for k in kinds])[0]
            summary.append(_text(self.summary_sentence(kind, all_sents, all_weights, used)))
        return {"record_id": rid, "documents": docs, "summary": summary, "extra_references": None}


def _text(tokens: Sequence[str]) -> str:
    return " ".join(tokens) + " ."


def generate_corpus(n_records: int, seed: int = 0, mix: str = "cnndm", n_docs: int = 1) -> list[dict]:
    gen = _Generator(seed, MIXES[mix])
    return [gen.record(f"{mix}-{seed}-{i:04d}", n_docs) for i in range(n_records)]


def main(argv: Sequence[str] | None = None) -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("out")
    ap.add_argument("--records", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--mix", choices=sorted(MIXES), default="cnndm")
    ap.add_argument("--docs", type=int, default=1, help="documents per record")
    args = ap.parse_args(argv)
    with open(args.out, "w", encoding="utf-8") as fh:
        for rec in generate_corpus(args.records, args.seed, args.mix, args.docs):
            fh.write(json.dumps(rec) + "\n")


if __name__ == "__main__":
    main()
