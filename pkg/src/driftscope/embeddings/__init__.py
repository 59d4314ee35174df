"""Weekly warm-started skip-gram embeddings with the mean-angle stopping rule.

The epoch inner loop runs in a compiled Cython kernel when available and
falls back to a pure-Python kernel with identical semantics otherwise
(set DRIFTSCOPE_FORCE_PY=1 to force the fallback).
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass, field

import numpy as np

from ..corpus import Vocabulary, WeekBucket
from . import _sgns_py
from ._sgns_py import pair_loss, splitmix64

if os.environ.get("DRIFTSCOPE_FORCE_PY"):
    _kernel = _sgns_py
    BACKEND = "python"
else:
    try:
        from . import _sgns_c as _kernel  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _kernel = _sgns_py
        BACKEND = "python"

_MAGIC = b"DSEM"
_HEADER = struct.Struct("<4sIIIIQ")  # magic, version, |V|, d, week, seed


@dataclass(frozen=True)
class EmbedParams:
    d: int = 30
    window: int = 5
    negatives: int = 5
    initial_lr: float = 0.025
    rho_threshold: float = 0.0001
    max_epochs: int = 50
    seed: int = 1

    def __post_init__(self):
        if (self.d < 2 or self.window < 1 or self.negatives < 0
                or self.initial_lr <= 0 or self.rho_threshold <= 0
                or self.max_epochs < 1):
            raise ValueError(f"invalid embedding parameters: {self}")


@dataclass
class EmbeddingSnapshot:
    week_index: int
    w_in: np.ndarray       # (|V|, d) word vectors, the e_t(w)
    w_out: np.ndarray      # (|V|, d) context vectors
    epochs_run: int
    final_rho: float
    cap_hit: bool = False

    def vector(self, word_id: int) -> np.ndarray:
        return self.w_in[word_id]


@dataclass
class EmbeddingSeries:
    vocab: Vocabulary
    snapshots: list[EmbeddingSnapshot] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.snapshots)

    def word_path(self, word: str) -> np.ndarray:
        """(T, d) stack of one word's vectors across all weeks."""
        i = self.vocab.ids[word]
        return np.stack([s.w_in[i] for s in self.snapshots])


class TrainingError(Exception):
    pass


def epoch_angle(prev: np.ndarray, cur: np.ndarray) -> float:
    """Mean angular change (radians) between matching rows of two matrices.

    Zero-norm rows contribute 0. Raises on shape mismatch.
    """
    if prev.shape != cur.shape:
        raise TrainingError(f"shape mismatch {prev.shape} vs {cur.shape}")
    dots = np.einsum("ij,ij->i", prev, cur)
    norms = np.linalg.norm(prev, axis=1) * np.linalg.norm(cur, axis=1)
    ok = norms > 0
    cos = np.ones(len(dots))
    cos[ok] = np.clip(dots[ok] / norms[ok], -1.0, 1.0)
    return float(np.arccos(cos).mean())


def unigram_noise_cdf(token_counts: np.ndarray) -> np.ndarray:
    """CDF of the unigram distribution raised to 3/4, for negative sampling."""
    w = np.asarray(token_counts, dtype=np.float64) ** 0.75
    total = w.sum()
    if total == 0:
        w = np.ones_like(w)
        total = len(w)
    return np.cumsum(w / total)


def bucket_token_ids(bucket: WeekBucket, vocab: Vocabulary):
    """Flatten a bucket into (tokens, offsets) arrays of vocabulary ids."""
    ids, offsets = [], [0]
    for post in bucket.posts:
        ids.extend(vocab.ids[t] for t in post.tokens if t in vocab.ids)
        offsets.append(len(ids))
    return (
        np.asarray(ids, dtype=np.int32),
        np.asarray(offsets, dtype=np.int64),
    )


def corpus_token_counts(buckets: list[WeekBucket], vocab: Vocabulary) -> np.ndarray:
    counts = np.zeros(len(vocab), dtype=np.int64)
    for bucket in buckets:
        for post in bucket.posts:
            for tok in post.tokens:
                i = vocab.ids.get(tok)
                if i is not None:
                    counts[i] += 1
    return counts


def _learning_rate(params: EmbedParams, epoch: int) -> float:
    """Linear decay to a 1e-5 floor a few epochs before the cap.

    The floor must be reached strictly before max_epochs: the mean-angle
    stopping rule can only fire once steps are small, and reaching the
    floor early keeps the epoch cap an actual safeguard instead of the
    common exit path. The floor is deep enough that the per-epoch mean
    angle drops below the stopping threshold even on busy weeks where a
    single epoch applies millions of pair updates.
    """
    horizon = max(params.max_epochs - 5, 1)
    return params.initial_lr * max(1.0 - epoch / horizon, 1e-5)


def _train_until_converged(
    w_in: np.ndarray,
    w_out: np.ndarray,
    bucket: WeekBucket,
    vocab: Vocabulary,
    params: EmbedParams,
    noise_cdf: np.ndarray,
    week: int,
    kernel=None,
) -> EmbeddingSnapshot:
    kernel = kernel or _kernel
    tokens, offsets = bucket_token_ids(bucket, vocab)
    if len(tokens) == 0:
        return EmbeddingSnapshot(week, w_in, w_out, epochs_run=0, final_rho=0.0)
    epochs_run, rho = 0, float("inf")
    for epoch in range(params.max_epochs):
        prev = w_in.copy()
        epoch_seed = splitmix64(params.seed + 1_000_003 * week + epoch)
        kernel.train_epoch(
            w_in, w_out, tokens, offsets,
            params.window, params.negatives,
            _learning_rate(params, epoch), noise_cdf, epoch_seed,
        )
        rho = epoch_angle(prev, w_in)
        epochs_run = epoch + 1
        if rho <= params.rho_threshold:
            break
    if not (np.isfinite(w_in).all() and np.isfinite(w_out).all()):
        raise TrainingError(f"non-finite embedding values at week {week}")
    return EmbeddingSnapshot(
        week, w_in, w_out,
        epochs_run=epochs_run,
        final_rho=rho,
        cap_hit=rho > params.rho_threshold,
    )


def train_initial(
    bucket: WeekBucket,
    vocab: Vocabulary,
    params: EmbedParams,
    noise_cdf: np.ndarray | None = None,
    kernel=None,
) -> EmbeddingSnapshot:
    """Train week-0 embeddings from a seeded uniform initialization."""
    if bucket.post_count == 0:
        raise TrainingError("cannot initialize embeddings from an empty bucket")
    rng = np.random.default_rng(params.seed)
    bound = 0.5 / params.d
    w_in = rng.uniform(-bound, bound, (len(vocab), params.d))
    w_out = rng.uniform(-bound, bound, (len(vocab), params.d))
    if noise_cdf is None:
        noise_cdf = unigram_noise_cdf(corpus_token_counts([bucket], vocab))
    return _train_until_converged(
        w_in, w_out, bucket, vocab, params, noise_cdf, bucket.week_index, kernel
    )


def train_incremental(
    prev: EmbeddingSnapshot,
    bucket: WeekBucket,
    vocab: Vocabulary,
    params: EmbedParams,
    noise_cdf: np.ndarray | None = None,
    kernel=None,
) -> EmbeddingSnapshot:
    """Train one more week starting from the previous week's matrices."""
    if noise_cdf is None:
        noise_cdf = unigram_noise_cdf(corpus_token_counts([bucket], vocab))
    return _train_until_converged(
        prev.w_in.copy(), prev.w_out.copy(),
        bucket, vocab, params, noise_cdf, bucket.week_index, kernel,
    )


def train_series(
    buckets: list[WeekBucket],
    vocab: Vocabulary,
    params: EmbedParams,
    kernel=None,
    progress=None,
) -> EmbeddingSeries:
    """Warm-start chain over all weeks, sharing one corpus-level noise CDF."""
    noise_cdf = unigram_noise_cdf(corpus_token_counts(buckets, vocab))
    series = EmbeddingSeries(vocab=vocab)
    snap = train_initial(buckets[0], vocab, params, noise_cdf, kernel)
    series.snapshots.append(snap)
    for bucket in buckets[1:]:
        snap = train_incremental(snap, bucket, vocab, params, noise_cdf, kernel)
        series.snapshots.append(snap)
        if progress:
            progress(snap)
    return series


def save_snapshot(snap: EmbeddingSnapshot, path: str, seed: int = 0) -> None:
    """Binary matrix file (header + float32 rows) plus a JSON sidecar."""
    n, d = snap.w_in.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, 1, n, d, snap.week_index, seed))
        fh.write(snap.w_in.astype("<f4").tobytes())
        fh.write(snap.w_out.astype("<f4").tobytes())
    sidecar = {
        "week_index": snap.week_index,
        "epochs_run": snap.epochs_run,
        "final_rho": snap.final_rho,
        "cap_hit": snap.cap_hit,
    }
    with open(path + ".json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, sort_keys=True)
        fh.write("\n")


def load_snapshot(path: str) -> EmbeddingSnapshot:
    with open(path, "rb") as fh:
        magic, version, n, d, week, _seed = _HEADER.unpack(fh.read(_HEADER.size))
        if magic != _MAGIC or version != 1:
            raise TrainingError(f"not a snapshot file: {path}")
        w_in = np.frombuffer(fh.read(n * d * 4), dtype="<f4").reshape(n, d).astype(np.float64)
        w_out = np.frombuffer(fh.read(n * d * 4), dtype="<f4").reshape(n, d).astype(np.float64)
    meta = {"epochs_run": 0, "final_rho": 0.0, "cap_hit": False}
    if os.path.exists(path + ".json"):
        with open(path + ".json", encoding="utf-8") as fh:
            meta.update(json.load(fh))
    return EmbeddingSnapshot(
        week, w_in, w_out,
        epochs_run=meta["epochs_run"],
        final_rho=meta["final_rho"],
        cap_hit=meta["cap_hit"],
    )


def save_series(series: EmbeddingSeries, dirpath: str, seed: int = 0) -> None:
    os.makedirs(dirpath, exist_ok=True)
    for snap in series.snapshots:
        save_snapshot(snap, os.path.join(dirpath, f"week_{snap.week_index:03d}.bin"), seed)


def load_series(dirpath: str, vocab: Vocabulary) -> EmbeddingSeries:
    files = sorted(f for f in os.listdir(dirpath) if f.endswith(".bin"))
    snaps = [load_snapshot(os.path.join(dirpath, f)) for f in files]
    for snap in snaps:
        if snap.w_in.shape[0] != len(vocab):
            raise TrainingError("snapshot vocabulary size mismatch")
    return EmbeddingSeries(vocab=vocab, snapshots=snaps)
