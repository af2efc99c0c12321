"""Vector and matrix proximal operators and the norms they regularize.

Soft-thresholding, singular-value thresholding (the nuclear-norm prox),
the sorted-l1 (SLOPE) norm with its prox, and the l2-ball projection.
Dense SVD throughout; truncated/randomized SVD is out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def soft_threshold(v, a):
    """sign(v) * max(|v| - a, 0); elementwise on arrays."""
    if np.any(np.asarray(a) < 0):
        raise ValueError("threshold must be nonnegative")
    v = np.asarray(v, dtype=float)
    out = np.sign(v) * np.maximum(np.abs(v) - a, 0.0)
    return out if out.ndim else float(out)


def svt(m: np.ndarray, a: float) -> np.ndarray:
    """Soft-threshold the singular values of m by a.

    This is the prox of a*||.||_S1 at m: argmin_X ||X-m||_F^2/2 + a*||X||_S1.
    SVD failures (np.linalg.LinAlgError) propagate to the caller.
    """
    if a < 0:
        raise ValueError("threshold must be nonnegative")
    u, s, vt = np.linalg.svd(np.asarray(m, dtype=float), full_matrices=False)
    s = np.maximum(s - a, 0.0)
    return (u * s) @ vt


def nuclear_norm(m: np.ndarray) -> float:
    """Sum of singular values (Schatten-1 / trace norm)."""
    return float(np.linalg.svd(np.asarray(m, dtype=float), compute_uv=False).sum())


def l1_norm(t) -> float:
    return float(np.abs(np.asarray(t, dtype=float)).sum())


def project_l2_ball(t: np.ndarray, radius: float) -> np.ndarray:
    """Radial projection of t onto the l2 ball of the given radius."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    t = np.asarray(t, dtype=float)
    nrm = float(np.linalg.norm(t))
    if nrm <= radius:
        return t.copy()
    return t * (radius / nrm)


@dataclass(frozen=True)
class SlopeWeights:
    """Non-increasing positive weight sequence for the sorted-l1 norm."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty vector")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        if np.any(np.diff(w) > 0):
            raise ValueError("weights must be non-increasing")
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.weights.size

    def scaled(self, c: float) -> "SlopeWeights":
        if c <= 0:
            raise ValueError("scale must be positive")
        return SlopeWeights(self.weights * c)


def slope_weights(p: int) -> SlopeWeights:
    """Canonical sequence w_j = sqrt(log(e*p/j)), j = 1..p."""
    if p < 1:
        raise ValueError("p must be >= 1")
    j = np.arange(1, p + 1, dtype=float)
    return SlopeWeights(np.sqrt(np.log(math.e * p / j)))


def slope_norm(t, w: SlopeWeights) -> float:
    """Weighted sum of the non-increasingly sorted absolute entries of t."""
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size != len(w):
        raise ValueError(f"dimension mismatch: |t|={t.size}, |w|={len(w)}")
    mags = np.sort(np.abs(t))[::-1]
    return float(mags @ w.weights)


def slope_prox(v, w: SlopeWeights) -> np.ndarray:
    """argmin_t slope_norm(t, w) + ||t - v||^2 / 2.

    Sort |v| to non-increasing order, run the stack-based pool-adjacent-
    violators pass on |v|_(j) - w_j, clamp at zero, then restore the original
    order and signs.  With all weights equal this reduces exactly to
    entrywise soft-thresholding.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size != len(w):
        raise ValueError(f"dimension mismatch: |v|={v.size}, |w|={len(w)}")
    order = np.argsort(-np.abs(v), kind="stable")
    z = np.abs(v)[order] - w.weights

    # Each stack block holds (running sum, length); merge while averages
    # fail to decrease, so block averages end strictly decreasing.
    sums = np.empty(v.size)
    lens = np.empty(v.size, dtype=int)
    top = -1
    for x in z:
        top += 1
        sums[top] = x
        lens[top] = 1
        while top > 0 and sums[top - 1] * lens[top] <= sums[top] * lens[top - 1]:
            sums[top - 1] += sums[top]
            lens[top - 1] += lens[top]
            top -= 1
    mags = np.empty(v.size)
    pos = 0
    for b in range(top + 1):
        val = max(sums[b] / lens[b], 0.0)
        mags[pos:pos + lens[b]] = val
        pos += lens[b]

    out = np.empty_like(v)
    out[order] = mags
    return np.sign(v) * out
