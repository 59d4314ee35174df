"""Corpus ingestion: tokenization, weekly bucketing and vocabulary construction."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, TextIO

Stemmer = Callable[[str], str]

_URL_RE = re.compile(r"https?://\S+|www\.\S+")
# Everything that is not a letter, digit or underscore separates tokens.
_NONWORD_RE = re.compile(r"[^\w]+", re.UNICODE)

# Small fixed suffix list for the default stemmer; longest match wins.
_SUFFIXES = (
    "иями", "ями", "ами", "ого", "его", "ому", "ему", "ыми", "ими",
    "ать", "ять", "ить", "еть", "ует", "ение", "ство",
    "ов", "ев", "ие", "ые", "ый", "ий", "ая", "яя", "ой", "ей",
    "ом", "ем", "ам", "ям", "ах", "ях", "ут", "ют", "ат", "ят",
    "а", "я", "о", "е", "ы", "и", "у", "ю", "ь",
    "ing", "edly", "ed", "ly", "es", "s",
)


def identity_stemmer(word: str) -> str:
    return word


def suffix_stemmer(word: str) -> str:
    """Strip one suffix from the fixed list, keeping a stem of length >= 3."""
    for suf in _SUFFIXES:
        if len(word) - len(suf) >= 3 and word.endswith(suf):
            return word[: -len(suf)]
    return word


class CorpusError(Exception):
    """Raised on unreadable sources or empty corpora."""


@dataclass(frozen=True)
class Post:
    post_id: str
    timestamp: int
    tokens: tuple[str, ...]
    region: str | None = None


@dataclass
class WeekBucket:
    week_index: int
    posts: list[Post] = field(default_factory=list)

    @property
    def post_count(self) -> int:
        return len(self.posts)


@dataclass
class Vocabulary:
    words: list[str]                  # index == word id
    ids: dict[str, int]
    post_freq: dict[str, int]         # distinct posts containing the word
    stopword_flags: list[bool]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.ids

    def is_stopword(self, word: str) -> bool:
        return self.stopword_flags[self.ids[word]]

    def content_words(self) -> list[str]:
        """Retained words with the stopword flag off (usage-statistics vocabulary)."""
        return [w for w, s in zip(self.words, self.stopword_flags) if not s]

    def to_dict(self) -> dict:
        return {
            "words": self.words,
            "post_freq": [self.post_freq[w] for w in self.words],
            "stopword_flags": self.stopword_flags,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Vocabulary":
        words = list(d["words"])
        return cls(
            words=words,
            ids={w: i for i, w in enumerate(words)},
            post_freq=dict(zip(words, d["post_freq"])),
            stopword_flags=list(d["stopword_flags"]),
        )


def tokenize_normalize(text: str, stemmer: Stemmer = identity_stemmer) -> list[str]:
    """Lowercase, strip URLs, split on non-word characters, stem, drop empties."""
    text = _URL_RE.sub(" ", text)
    out = []
    for raw in _NONWORD_RE.split(text.lower()):
        if not raw:
            continue
        stemmed = stemmer(raw)
        if stemmed:
            out.append(stemmed)
    return out


def ingest_posts(
    source: Iterable[str] | TextIO,
    stemmer: Stemmer = identity_stemmer,
    week_origin: int = 0,
    week_len: int = 7 * 24 * 3600,
) -> tuple[list[WeekBucket], int]:
    """Parse a JSONL stream into contiguous weekly buckets.

    Malformed records are skipped and counted; returns (buckets, skipped).
    Buckets cover week 0 through the last observed week with no gaps.
    """
    by_week: dict[int, list[Post]] = {}
    skipped = 0
    try:
        lines = iter(source)
    except TypeError as exc:
        raise CorpusError(f"unreadable source: {exc}") from exc
    for line in lines:
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
            post_id = str(rec["id"])
            ts = int(rec["timestamp"])
            text = rec["text"]
            region = rec.get("region")
            if not isinstance(text, str) or ts < week_origin:
                raise ValueError("bad record")
        except (ValueError, KeyError, TypeError, json.JSONDecodeError):
            skipped += 1
            continue
        week = (ts - week_origin) // week_len
        tokens = tuple(tokenize_normalize(text, stemmer))
        by_week.setdefault(week, []).append(
            Post(post_id=post_id, timestamp=ts, tokens=tokens, region=region)
        )
    if not by_week:
        raise CorpusError("no valid posts in source")
    n_weeks = max(by_week) + 1
    return [WeekBucket(t, by_week.get(t, [])) for t in range(n_weeks)], skipped


def filter_region(buckets: list[WeekBucket], region: str) -> list[WeekBucket]:
    """Same week layout, restricted to posts tagged with the given region."""
    return [
        WeekBucket(b.week_index, [p for p in b.posts if p.region == region])
        for b in buckets
    ]


def build_vocabulary(
    buckets: list[WeekBucket],
    min_post_freq: int = 5,
    stopwords: set[str] | frozenset[str] = frozenset(),
) -> Vocabulary:
    """Retain words appearing in >= min_post_freq distinct posts corpus-wide.

    Stopwords in the given set are retained with the flag set: they stay in
    the embedding vocabulary but are excluded from usage statistics.
    Ids are assigned by descending post frequency, ties lexicographic.
    """
    if not buckets:
        raise CorpusError("empty bucket list")
    pf: dict[str, int] = {}
    for bucket in buckets:
        for post in bucket.posts:
            for w in set(post.tokens):
                pf[w] = pf.get(w, 0) + 1
    retained = [w for w, c in pf.items() if c >= min_post_freq]
    retained.sort(key=lambda w: (-pf[w], w))
    return Vocabulary(
        words=retained,
        ids={w: i for i, w in enumerate(retained)},
        post_freq={w: pf[w] for w in retained},
        stopword_flags=[w in stopwords for w in retained],
    )


def load_stopwords(path: str) -> set[str]:
    with open(path, encoding="utf-8") as fh:
        return {line.strip() for line in fh if line.strip()}
