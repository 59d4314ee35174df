"""First-order difference series: usage drift, representation shift, cumulative shift."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .corpus import Vocabulary
from .embeddings import EmbeddingSeries
from .usage import UsageSeries


def cosine_distance(u: np.ndarray, v: np.ndarray) -> float:
    """1 - cos(u, v), clamped to [0, 2]. Zero-norm inputs are defined as 0."""
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.clip(1.0 - np.dot(u, v) / (nu * nv), 0.0, 2.0))


def diff_usage(series: np.ndarray) -> np.ndarray:
    """Adjacent-week subtraction; length T-1."""
    series = np.asarray(series)
    if series.shape[-1] < 2:
        raise ValueError("need at least 2 time steps to difference")
    return np.diff(series, axis=-1)


def _pairwise_cosine_distance(path: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Row-wise cosine distance of `path` rows against `ref` rows."""
    dots = np.einsum("ij,ij->i", path, ref)
    norms = np.linalg.norm(path, axis=1) * np.linalg.norm(ref, axis=1)
    out = np.zeros(len(dots))
    ok = norms > 0
    out[ok] = np.clip(1.0 - dots[ok] / norms[ok], 0.0, 2.0)
    return out


def diff_embeddings(series: EmbeddingSeries, word: str) -> np.ndarray:
    """Cosine distance between a word's consecutive weekly vectors; length T-1."""
    path = series.word_path(word)
    return _pairwise_cosine_distance(path[1:], path[:-1])


def cumulative_shift(series: EmbeddingSeries, word: str) -> np.ndarray:
    """Cosine distance of each week's vector to the week-0 vector; out[0] = 0."""
    path = series.word_path(word)
    out = _pairwise_cosine_distance(path, np.broadcast_to(path[0], path.shape).copy())
    out[0] = 0.0
    return out


@dataclass
class ShiftSeries:
    """All difference series for one corpus.

    d_f / d_chi are aligned with usage_words (non-stopword vocabulary);
    d_e / cum are aligned with the full embedding vocabulary.
    """

    vocab: Vocabulary
    usage_words: list[str]
    d_f: np.ndarray        # (n_usage_words, T-1)
    d_chi: np.ndarray      # (n_usage_words, T-1)
    d_e: np.ndarray        # (|V|, T-1)
    cum: np.ndarray        # (|V|, T)

    @property
    def n_weeks(self) -> int:
        return self.cum.shape[1]

    def usage_index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.usage_words)}


def build_shift_series(usage: UsageSeries, emb: EmbeddingSeries) -> ShiftSeries:
    vocab = emb.vocab
    T = len(emb)
    stacks = np.stack([s.w_in for s in emb.snapshots])  # (T, |V|, d)
    n = len(vocab)
    d_e = np.zeros((n, T - 1))
    cum = np.zeros((n, T))
    for t in range(1, T):
        d_e[:, t - 1] = _pairwise_cosine_distance(stacks[t], stacks[t - 1])
        cum[:, t] = _pairwise_cosine_distance(stacks[t], stacks[0])
    return ShiftSeries(
        vocab=vocab,
        usage_words=usage.words,
        d_f=diff_usage(usage.freq),
        d_chi=diff_usage(usage.tfidf),
        d_e=d_e,
        cum=cum,
    )


def write_dynamics_csv(shifts: ShiftSeries, fh: TextIO) -> None:
    """Rows (word, t, d_f, d_chi, d_e, cum); usage columns blank for stopwords."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["word", "t", "d_f", "d_chi", "d_e", "cum"])
    uidx = shifts.usage_index()
    for w in shifts.vocab.words:
        wid = shifts.vocab.ids[w]
        ui = uidx.get(w)
        for t in range(shifts.n_weeks - 1):
            writer.writerow([
                w, t,
                repr(float(shifts.d_f[ui, t])) if ui is not None else "",
                repr(float(shifts.d_chi[ui, t])) if ui is not None else "",
                repr(float(shifts.d_e[wid, t])),
                repr(float(shifts.cum[wid, t + 1])),
            ])
