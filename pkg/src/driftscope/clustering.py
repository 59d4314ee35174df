"""LOWESS smoothing, spectral clustering of difference series, trend labels."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from sklearn.cluster import KMeans

from .corpus import Vocabulary


@dataclass(frozen=True)
class ClusterConfig:
    c: int = 3
    lowess_frac: float = 0.25
    affinity_sigma: float | None = None   # None -> median pairwise distance
    sample_size: int = 5000
    seed: int = 1

    def __post_init__(self):
        if self.c < 1 or not (0 < self.lowess_frac <= 1):
            raise ValueError(f"invalid cluster config: {self}")


@dataclass
class TrajectoryClustering:
    words: list[str]
    assignments: dict[str, int]
    mean_trajectories: np.ndarray          # (c, len)
    trend_labels: list[str]                # per cluster: increase/decrease/flatline
    member_fractions: list[float]
    degenerate: bool = False
    top_members: list[list[str]] = field(default_factory=list)


def lowess_smooth(series: np.ndarray, frac: float = 0.25) -> np.ndarray:
    """Locally weighted linear regression with tricube weights.

    Fits over the nearest ceil(frac*n) indices at every point; single pass,
    no robustness iterations. Windows with fewer than 2 usable points fall
    back to the window mean.
    """
    y = np.asarray(series, dtype=np.float64)
    n = len(y)
    if n < 3:
        raise ValueError("series too short to smooth")
    if not (0 < frac <= 1):
        raise ValueError("frac must be in (0, 1]")
    r = max(int(np.ceil(frac * n)), 2)
    x = np.arange(n, dtype=np.float64)
    out = np.empty(n)
    for i in range(n):
        dist = np.abs(x - x[i])
        idx = np.argsort(dist, kind="stable")[:r]
        h = dist[idx].max()
        if h == 0:
            out[i] = y[idx].mean()
            continue
        w = (1.0 - (dist[idx] / h) ** 3) ** 3
        w[w < 0] = 0.0
        if (w > 0).sum() < 2:
            out[i] = y[idx].mean()
            continue
        sw = w.sum()
        xm = (w * x[idx]).sum() / sw
        ym = (w * y[idx]).sum() / sw
        sxx = (w * (x[idx] - xm) ** 2).sum()
        if sxx == 0:
            out[i] = ym
            continue
        b = (w * (x[idx] - xm) * (y[idx] - ym)).sum() / sxx
        out[i] = ym + b * (x[i] - xm)
    return out


def _cosine_distance_matrix(rows: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    unit = rows / safe[:, None]
    d = 1.0 - unit @ unit.T
    d[norms == 0, :] = 0.0
    d[:, norms == 0] = 0.0
    np.fill_diagonal(d, 0.0)
    return np.clip(d, 0.0, 2.0)


def spectral_cluster(series_set: np.ndarray, config: ClusterConfig) -> tuple[np.ndarray, bool]:
    """Spectral clustering under exp(-d_cos/sigma) affinity.

    Returns (assignments, degenerate). All-identical inputs collapse to a
    single cluster with the degeneracy flag set rather than failing.
    """
    series_set = np.asarray(series_set, dtype=np.float64)
    m = len(series_set)
    if m < config.c:
        raise ValueError(f"need at least {config.c} series, got {m}")
    if config.c == 1:
        return np.zeros(m, dtype=int), False
    dist = _cosine_distance_matrix(series_set)
    off_diag = dist[~np.eye(m, dtype=bool)]
    sigma = config.affinity_sigma
    if sigma is None:
        sigma = float(np.median(off_diag))
    if sigma <= 0 or off_diag.max() == 0:
        return np.zeros(m, dtype=int), True
    affinity = np.exp(-dist / sigma)
    deg = affinity.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(deg)
    lap = np.eye(m) - affinity * inv_sqrt[:, None] * inv_sqrt[None, :]
    _, vecs = scipy.linalg.eigh(lap, subset_by_index=[0, config.c - 1])
    row_norms = np.linalg.norm(vecs, axis=1)
    vecs = vecs / np.where(row_norms > 0, row_norms, 1.0)[:, None]
    km = KMeans(n_clusters=config.c, init="k-means++", n_init=10, random_state=config.seed)
    return km.fit_predict(vecs), False


def label_trends(mean_trajectory: np.ndarray, theta: float) -> str:
    m = float(np.mean(mean_trajectory))
    if m > theta:
        return "increase"
    if m < -theta:
        return "decrease"
    return "flatline"


def cluster_trajectories(
    words: list[str],
    series_matrix: np.ndarray,
    vocab: Vocabulary,
    config: ClusterConfig = ClusterConfig(),
) -> TrajectoryClustering:
    """Full pipeline: subsample by post frequency, smooth, cluster, label."""
    order = sorted(range(len(words)), key=lambda i: (-vocab.post_freq.get(words[i], 0), words[i]))
    keep = order[: config.sample_size]
    sampled = [words[i] for i in keep]
    smoothed = np.stack([lowess_smooth(series_matrix[i], config.lowess_frac) for i in keep])
    assign, degenerate = spectral_cluster(smoothed, config)
    means = np.zeros((config.c, smoothed.shape[1]))
    fractions = []
    for c in range(config.c):
        members = assign == c
        fractions.append(float(members.mean()))
        if members.any():
            means[c] = smoothed[members].mean(axis=0)
    cluster_means = np.array([np.mean(means[c]) for c in range(config.c)])
    theta = 0.25 * float(np.std(cluster_means))
    labels = [label_trends(means[c], theta) for c in range(config.c)]
    top = []
    for c in range(config.c):
        members = [w for w, a in zip(sampled, assign) if a == c]
        members.sort(key=lambda w: (-vocab.post_freq.get(w, 0), w))
        top.append(members)
    return TrajectoryClustering(
        words=sampled,
        assignments=dict(zip(sampled, (int(a) for a in assign))),
        mean_trajectories=means,
        trend_labels=labels,
        member_fractions=fractions,
        degenerate=degenerate,
        top_members=top,
    )


def cluster_report(clustering: TrajectoryClustering, k: int = 6) -> list[dict]:
    """Table rows sorted by cluster id, sample members ranked by post frequency."""
    rows = []
    for c, (label, frac) in enumerate(
        zip(clustering.trend_labels, clustering.member_fractions)
    ):
        rows.append({
            "cluster": c,
            "trend": label,
            "percent_words": round(100.0 * frac, 1),
            "sample_words": clustering.top_members[c][:k],
        })
    return rows


def format_report(rows: list[dict]) -> str:
    lines = [f"{'Cluster':<8}{'Trend':<10}{'Words':<8}Sample of most frequent words"]
    for r in rows:
        lines.append(
            f"{r['cluster']:<8}{r['trend']:<10}{str(r['percent_words']) + '%':<8}"
            + ", ".join(r["sample_words"])
        )
    return "\n".join(lines)
