"""Pure-Python skip-gram negative-sampling epoch kernel.

Fallback for environments without the compiled extension. Mirrors the
Cython kernel operation-for-operation, including the RNG sequence, so the
two backends produce numerically matching updates.
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D
Z_CLIP = 30.0


def splitmix64(x: int) -> int:
    """Seed-derivation hash; used to give each (week, epoch) its own stream."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def _xorshift(state: int) -> int:
    state ^= (state >> 12)
    state = (state ^ (state << 25)) & _MASK
    state ^= (state >> 27)
    return state


def _sigmoid(z: float) -> float:
    if z > Z_CLIP:
        z = Z_CLIP
    elif z < -Z_CLIP:
        z = -Z_CLIP
    return 1.0 / (1.0 + math.exp(-z))


def pair_loss(center_vec: np.ndarray, target_vecs: np.ndarray, labels: np.ndarray) -> float:
    """Negative log-likelihood of one SGNS training group (positive + negatives).

    Kept free of the update path so tests can finite-difference it.
    """
    loss = 0.0
    for vec, label in zip(target_vecs, labels):
        z = float(np.dot(center_vec, vec))
        p = _sigmoid(z)
        loss -= math.log(p) if label else math.log(1.0 - p)
    return loss


def train_epoch(
    w_in: np.ndarray,
    w_out: np.ndarray,
    tokens: np.ndarray,
    offsets: np.ndarray,
    window: int,
    negatives: int,
    lr: float,
    noise_cdf: np.ndarray,
    seed: int,
) -> float:
    """One SGNS pass over the bucket; updates w_in / w_out in place.

    tokens holds vocabulary ids for all posts back to back; offsets marks
    post boundaries. Negative targets are drawn by inverse-CDF sampling
    from noise_cdf (unigram^(3/4)). Returns the summed pair loss.
    """
    state = seed & _MASK
    if state == 0:
        state = 0x9E3779B97F4A7C15
    n_vocab = noise_cdf.shape[0]
    total_loss = 0.0
    for p in range(len(offsets) - 1):
        start, end = int(offsets[p]), int(offsets[p + 1])
        for i in range(start, end):
            center = int(tokens[i])
            lo = max(start, i - window)
            hi = min(end, i + window + 1)
            for j in range(lo, hi):
                if j == i:
                    continue
                context = int(tokens[j])
                grad_center = np.zeros_like(w_in[center])
                cvec = w_in[center]
                # positive target then `negatives` noise draws
                for k in range(negatives + 1):
                    if k == 0:
                        target, label = context, 1.0
                    else:
                        state = _xorshift(state)
                        u = ((state * _MULT) & _MASK) / 2.0**64
                        target = int(np.searchsorted(noise_cdf, u, side="right"))
                        if target >= n_vocab:
                            target = n_vocab - 1
                        if target == context:
                            continue
                        label = 0.0
                    z = float(np.dot(cvec, w_out[target]))
                    p_hat = _sigmoid(z)
                    total_loss -= math.log(p_hat) if label else math.log(1.0 - p_hat)
                    g = (label - p_hat) * lr
                    grad_center += g * w_out[target]
                    w_out[target] += g * cvec
                w_in[center] += grad_center
    return total_loss
