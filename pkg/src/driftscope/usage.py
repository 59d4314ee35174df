"""Per-week usage statistics: normalized frequency and tf-idf time series."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .corpus import Vocabulary, WeekBucket


@dataclass
class UsageSeries:
    """Frequency and tf-idf series for the non-stopword vocabulary.

    freq and tfidf are (n_words, T) arrays aligned with `words`;
    empty_weeks marks weeks whose bucket had no countable tokens.
    """

    words: list[str]
    freq: np.ndarray
    tfidf: np.ndarray
    empty_weeks: list[int]

    @property
    def n_weeks(self) -> int:
        return self.freq.shape[1]

    def index(self, word: str) -> int:
        try:
            return self.words.index(word)
        except ValueError:
            raise KeyError(word) from None


def _bucket_counts(bucket: WeekBucket, content: set[str]):
    """Token occurrence counts and distinct-post counts over content words."""
    counts: dict[str, int] = {}
    df: dict[str, int] = {}
    for post in bucket.posts:
        seen = set()
        for tok in post.tokens:
            if tok in content:
                counts[tok] = counts.get(tok, 0) + 1
                seen.add(tok)
        for tok in seen:
            df[tok] = df.get(tok, 0) + 1
    return counts, df


def term_frequency(bucket: WeekBucket, vocab: Vocabulary) -> dict[str, float]:
    """Normalized frequency of each non-stopword vocabulary word in the bucket.

    Empty buckets yield all zeros.
    """
    content = set(vocab.content_words())
    counts, _ = _bucket_counts(bucket, content)
    total = sum(counts.values())
    if total == 0:
        return {w: 0.0 for w in content}
    return {w: counts.get(w, 0) / total for w in content}


def tfidf(bucket: WeekBucket, vocab: Vocabulary) -> dict[str, float]:
    """tf-idf score ln(count) * ln(|P_t| / df) per non-stopword word.

    Zero when the word is absent, occurs once (ln 1 = 0), or appears in
    every post of the bucket.
    """
    content = set(vocab.content_words())
    counts, df = _bucket_counts(bucket, content)
    n_posts = bucket.post_count
    out = {}
    for w in content:
        c = counts.get(w, 0)
        if c == 0 or n_posts == 0 or df[w] == n_posts:
            out[w] = 0.0
        else:
            out[w] = math.log(c) * math.log(n_posts / df[w])
    return out


def build_usage_series(buckets: list[WeekBucket], vocab: Vocabulary) -> UsageSeries:
    """Chronological tau_f / tau_chi series over all weeks."""
    words = vocab.content_words()
    idx = {w: i for i, w in enumerate(words)}
    n, T = len(words), len(buckets)
    freq = np.zeros((n, T))
    chi = np.zeros((n, T))
    empty = []
    content = set(words)
    for t, bucket in enumerate(buckets):
        counts, df = _bucket_counts(bucket, content)
        total = sum(counts.values())
        if total == 0:
            empty.append(t)
            continue
        n_posts = bucket.post_count
        log_posts = math.log(n_posts)
        for w, c in counts.items():
            i = idx[w]
            freq[i, t] = c / total
            if c > 1 and df[w] < n_posts:
                chi[i, t] = math.log(c) * (log_posts - math.log(df[w]))
    return UsageSeries(words=words, freq=freq, tfidf=chi, empty_weeks=empty)


def write_usage_csv(series: UsageSeries, fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["word", "t", "f", "chi"])
    for i, w in enumerate(series.words):
        for t in range(series.n_weeks):
            writer.writerow(
                [w, t, repr(float(series.freq[i, t])), repr(float(series.tfidf[i, t]))]
            )
