"""Tokenization, stopwords, content words and n-grams."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .porter import porter_stem

__all__ = [
    "TokenizerConfig",
    "StopwordList",
    "tokenize",
    "porter_stem",
    "is_punctuation",
    "content_words",
    "ngrams",
    "default_stopwords",
    "load_stopwords",
]

_TOKEN_RE = re.compile(
    r"""
    (?:[^\W\d_]\.){2,}            # acronyms: u.s.  e.g.
    | \d+(?:[.,:]\d+)*            # numbers: 3.5  1,000  10:30
    | \w+(?:['’]\w+)*        # words, with inner apostrophes
    | ['’]\w+                # clitics split off upstream: 's  n't
    | [^\w\s]                     # any other single symbol
    """,
    re.VERBOSE | re.UNICODE,
)


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    split_punctuation: bool = True


DEFAULT_TOKENIZER = TokenizerConfig()


@dataclass(frozen=True)
class StopwordList:
    words: frozenset[str]

    def __post_init__(self) -> None:
        if not self.words:
            raise ValueError("stopword list must be non-empty")
        if any(w != w.lower() for w in self.words):
            raise ValueError("stopwords must be lowercase")

    def __contains__(self, token: object) -> bool:
        return token in self.words

    def __len__(self) -> int:
        return len(self.words)


def tokenize(text: str, config: TokenizerConfig = DEFAULT_TOKENIZER) -> list[str]:
    if config.lowercase:
        text = text.lower()
    if not config.split_punctuation:
        return text.split()
    return _TOKEN_RE.findall(text)


def _parse_stopwords(lines: Iterable[str]) -> StopwordList:
    words = {ln.strip().lower() for ln in lines}
    words.discard("")
    return StopwordList(frozenset(words))


def default_stopwords() -> StopwordList:
    """The bundled 127-word English list."""
    text = resources.files("singpair").joinpath("data/stopwords.txt").read_text("utf-8")
    return _parse_stopwords(text.splitlines())


def load_stopwords(path: str | Path) -> StopwordList:
    with open(path, encoding="utf-8") as fh:
        return _parse_stopwords(fh)


def is_punctuation(token: str) -> bool:
    return bool(token) and not any(ch.isalnum() for ch in token)


def content_words(tokens: Sequence[str], stopwords: StopwordList) -> list[str]:
    return [t for t in tokens if t not in stopwords and not is_punctuation(t)]


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    """Multiset of contiguous n-grams (as tuples)."""
    if n < 1:
        raise ValueError(f"n-gram order must be >= 1, got {n}")
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
