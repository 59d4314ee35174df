"""Nearest neighbors, neighbor-distance series, 2-D trajectories, correlations."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import cosine_distance
from .embeddings import EmbeddingSeries, EmbeddingSnapshot
from .forecast import MetricError, pearson


class UnknownWordError(KeyError):
    pass


@dataclass
class Trajectory2D:
    word: str
    points: np.ndarray                 # (T, 2)
    neighbors: list[dict]              # per week: {"t", "labels", "points"}
    basis: np.ndarray                  # (2, d)
    explained_variance: tuple[float, float]
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "word": self.word,
            "points": self.points.tolist(),
            "neighbors": self.neighbors,
            "evr": list(self.explained_variance),
            "degenerate": self.degenerate,
        }


@dataclass
class CorrelationMatrix:
    kind: str
    keywords: list[str]
    values: np.ndarray                 # NaN marks undefined entries

    def to_dict(self) -> dict:
        vals = [[None if np.isnan(v) else float(v) for v in row] for row in self.values]
        return {"kind": self.kind, "keywords": self.keywords, "values": vals}


def _distances(snapshot: EmbeddingSnapshot, word_id: int, metric: str) -> np.ndarray:
    vecs = snapshot.w_in
    q = vecs[word_id]
    if metric == "euclidean":
        return np.linalg.norm(vecs - q, axis=1)
    if metric != "cosine":
        raise ValueError(f"unknown metric {metric!r}")
    norms = np.linalg.norm(vecs, axis=1)
    qn = np.linalg.norm(q)
    out = np.zeros(len(vecs))
    ok = (norms > 0) & (qn > 0)
    out[ok] = np.clip(1.0 - (vecs[ok] @ q) / (norms[ok] * qn), 0.0, 2.0)
    return out


def nearest_neighbors(
    snapshot: EmbeddingSnapshot,
    series: EmbeddingSeries,
    word: str,
    k: int,
    metric: str = "cosine",
) -> list[tuple[str, float]]:
    """Exact k-nearest scan, ascending distance, ties broken by word id."""
    if word not in series.vocab.ids:
        raise UnknownWordError(word)
    wid = series.vocab.ids[word]
    dist = _distances(snapshot, wid, metric)
    order = np.lexsort((np.arange(len(dist)), dist))
    out = []
    for i in order:
        if i == wid:
            continue
        out.append((series.vocab.words[i], float(dist[i])))
        if len(out) == k:
            break
    return out


def neighbor_distance_series(
    series: EmbeddingSeries,
    word: str,
    neighbor_set: list[str] | None = None,
    metric: str = "cosine",
) -> dict[str, np.ndarray]:
    """Weekly cosine distance from the word to each neighbor.

    Defaults to the top-3 neighbors at the first week plus the top-3 at the
    last week.
    """
    if word not in series.vocab.ids:
        raise UnknownWordError(word)
    if neighbor_set is None:
        first = nearest_neighbors(series.snapshots[0], series, word, 3, metric)
        last = nearest_neighbors(series.snapshots[-1], series, word, 3, metric)
        neighbor_set = list(dict.fromkeys([w for w, _ in first] + [w for w, _ in last]))
    path = series.word_path(word)
    out = {}
    for nb in neighbor_set:
        if nb not in series.vocab.ids:
            raise UnknownWordError(nb)
        nb_path = series.word_path(nb)
        out[nb] = np.array(
            [cosine_distance(path[t], nb_path[t]) for t in range(len(path))]
        )
    return out


def project_trajectory(series: EmbeddingSeries, word: str, k: int = 2) -> Trajectory2D:
    """PCA of the word's weekly vectors plus each week's k nearest neighbors.

    Neighbors are found with the Euclidean metric; everything is projected
    onto the top-2 principal components of the stacked local point set.
    """
    if word not in series.vocab.ids:
        raise UnknownWordError(word)
    T = len(series)
    path = series.word_path(word)
    weekly_neighbors = []
    stack = [path]
    for t in range(T):
        nbs = nearest_neighbors(series.snapshots[t], series, word, k, metric="euclidean")
        labels = [w for w, _ in nbs]
        vecs = np.stack(
            [series.snapshots[t].w_in[series.vocab.ids[w]] for w in labels]
        ) if labels else np.zeros((0, path.shape[1]))
        weekly_neighbors.append((labels, vecs))
        if len(vecs):
            stack.append(vecs)
    allpts = np.concatenate(stack)
    mean = allpts.mean(axis=0)
    centered = allpts - mean
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    var = svals ** 2 / max(len(allpts) - 1, 1)
    total = var.sum()
    degenerate = bool(len(svals) < 2 or svals[1] <= 1e-12 * max(svals[0], 1.0))
    basis = np.zeros((2, path.shape[1]))
    basis[0] = vt[0]
    if not degenerate:
        basis[1] = vt[1]
    evr = (
        float(var[0] / total) if total > 0 else 0.0,
        float(var[1] / total) if total > 0 and len(var) > 1 and not degenerate else 0.0,
    )
    project = lambda pts: (pts - mean) @ basis.T
    neighbors = [
        {
            "t": t,
            "labels": labels,
            "points": project(vecs).tolist() if len(vecs) else [],
        }
        for t, (labels, vecs) in enumerate(weekly_neighbors)
    ]
    return Trajectory2D(
        word=word,
        points=project(path),
        neighbors=neighbors,
        basis=basis,
        explained_variance=evr,
        degenerate=degenerate,
    )


def series_correlation(
    series_a: dict[str, np.ndarray],
    series_b: dict[str, np.ndarray],
    keywords: list[str],
    kind: str = "correlation",
) -> CorrelationMatrix:
    """Pearson correlation of series_a[kw_i] against series_b[kw_j]."""
    n = len(keywords)
    values = np.full((n, n), np.nan)
    for i, a in enumerate(keywords):
        for j, b in enumerate(keywords):
            try:
                values[i, j] = pearson(series_a[a], series_b[b])
            except MetricError:
                pass
    return CorrelationMatrix(kind=kind, keywords=keywords, values=values)
