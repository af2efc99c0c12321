"""Scalar Lipschitz losses: values, subgradients, proximal maps, curvature constants.

Four families are supported: hinge and logistic for {-1,+1} labels, pinball
(quantile) and squared for real labels.  All functions accept scalars or numpy
arrays and broadcast.  The squared loss is a least-squares baseline; it is not
Lipschitz on the whole line and sits outside the fast-rate theory implemented
in `theory`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HINGE = "hinge"
LOGISTIC = "logistic"
QUANTILE = "quantile"
SQUARED = "squared"

_VARIANTS = (HINGE, LOGISTIC, QUANTILE, SQUARED)

# |gradient| tolerance for the logistic 1-D prox solve
_PROX_GRAD_TOL = 1e-10
_PROX_MAX_NEWTON = 120


@dataclass(frozen=True)
class LossKind:
    """Tagged loss family; `tau` is only meaningful for the quantile loss."""

    variant: str
    tau: float | None = None

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise ValueError(f"unknown loss variant: {self.variant!r}")
        if self.variant == QUANTILE:
            if self.tau is None or not (0.0 < self.tau < 1.0):
                raise ValueError(f"quantile loss needs 0 < tau < 1, got {self.tau}")
        elif self.tau is not None:
            raise ValueError(f"{self.variant} loss takes no tau parameter")

    @classmethod
    def hinge(cls) -> "LossKind":
        return cls(HINGE)

    @classmethod
    def logistic(cls) -> "LossKind":
        return cls(LOGISTIC)

    @classmethod
    def quantile(cls, tau: float) -> "LossKind":
        return cls(QUANTILE, float(tau))

    @classmethod
    def squared(cls) -> "LossKind":
        return cls(SQUARED)

    @property
    def classification(self) -> bool:
        return self.variant in (HINGE, LOGISTIC)

    @property
    def lipschitz(self) -> float:
        """Lipschitz constant in the prediction argument (1 for squared by convention)."""
        if self.variant == QUANTILE:
            return max(self.tau, 1.0 - self.tau)
        return 1.0

    def __str__(self) -> str:
        if self.variant == QUANTILE:
            return f"quantile:{self.tau:g}"
        return self.variant


@dataclass(frozen=True)
class BernsteinConstants:
    """Curvature pair (kappa, A) relating L2 distance to excess risk."""

    kappa: float
    a_const: float

    def __post_init__(self):
        if self.kappa < 1.0:
            raise ValueError(f"kappa must be >= 1, got {self.kappa}")
        if self.a_const <= 0.0:
            raise ValueError(f"a_const must be > 0, got {self.a_const}")


def _check_labels(kind: LossKind, label):
    if kind.classification:
        lab = np.asarray(label)
        if not np.all((lab == 1.0) | (lab == -1.0)):
            raise ValueError(f"{kind.variant} loss requires labels in {{-1,+1}}")


def loss_value(kind: LossKind, prediction, label):
    """Loss of predicting `prediction` against `label`; broadcasts over arrays."""
    _check_labels(kind, label)
    t = np.asarray(prediction, dtype=float)
    y = np.asarray(label, dtype=float)
    if kind.variant == HINGE:
        out = np.maximum(0.0, 1.0 - y * t)
    elif kind.variant == LOGISTIC:
        out = np.logaddexp(0.0, -y * t)
    elif kind.variant == QUANTILE:
        z = y - t
        out = z * (kind.tau - (z <= 0.0))
    else:
        out = 0.5 * (t - y) ** 2
    return out if out.ndim else float(out)


def loss_subgradient(kind: LossKind, prediction, label):
    """An element of the subdifferential in `prediction`; midpoint at kinks."""
    _check_labels(kind, label)
    t = np.asarray(prediction, dtype=float)
    y = np.asarray(label, dtype=float)
    if kind.variant == HINGE:
        yt = y * t
        out = np.where(yt < 1.0, -y, np.where(yt > 1.0, 0.0, -y / 2.0))
    elif kind.variant == LOGISTIC:
        # -y * sigma(-y t), written via expit for stability
        out = -y * _expit(-y * t)
    elif kind.variant == QUANTILE:
        tau = kind.tau
        out = np.where(t < y, -tau, np.where(t > y, 1.0 - tau, 0.5 - tau))
    else:
        out = t - y
    return out if out.ndim else float(out)


def _expit(x):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def scalar_prox(kind: LossKind, v: float, label: float, c: float,
                box: float | None = None) -> float:
    """argmin_t c*loss(t,label) + (t-v)^2/2, clamped to [-box, box] when given.

    Hinge and quantile use their closed forms (shifted soft-thresholding);
    the logistic minimizer is found by safeguarded Newton on the gradient.
    Clamping the unconstrained minimizer is exact because the objective is a
    convex function of one variable.
    """
    if c < 0.0:
        raise ValueError(f"prox scale c must be >= 0, got {c}")
    _check_labels(kind, label)
    t = float(np.asarray(_prox_unconstrained(
        kind, np.asarray(v, dtype=float), np.asarray(label, dtype=float), c)).reshape(-1)[0])
    if box is not None:
        if box <= 0.0:
            raise ValueError(f"box bound must be positive, got {box}")
        t = min(max(t, -box), box)
    return t


def prox_array(kind: LossKind, v: np.ndarray, label: np.ndarray, c: float,
               box: float | None = None) -> np.ndarray:
    """Vectorized `scalar_prox` over matching arrays of v and label."""
    if c < 0.0:
        raise ValueError(f"prox scale c must be >= 0, got {c}")
    _check_labels(kind, label)
    out = _prox_unconstrained(kind, np.asarray(v, dtype=float),
                              np.asarray(label, dtype=float), c)
    if box is not None:
        np.clip(out, -box, box, out=out)
    return out


def _prox_unconstrained(kind: LossKind, v, y, c):
    if c == 0.0:
        return np.array(v, dtype=float, copy=True)
    if kind.variant == HINGE:
        yv = y * v
        return np.where(yv >= 1.0, v, np.where(yv >= 1.0 - c, y, v + c * y))
    if kind.variant == QUANTILE:
        tau = kind.tau
        lo = y - c * tau
        hi = y + c * (1.0 - tau)
        return np.where(v < lo, v + c * tau, np.where(v > hi, v - c * (1.0 - tau), y))
    if kind.variant == SQUARED:
        return (v + c * y) / (1.0 + c)
    return _logistic_prox_newton(v, y, c)


def _logistic_prox_newton(v, y, c):
    """Root of g(t) = t - v - c*y*sigma(-y t); g' >= 1 so Newton is safe
    once guarded by the bracket [v-c, v+c]."""
    v = np.atleast_1d(np.array(v, dtype=float))
    y = np.broadcast_to(np.asarray(y, dtype=float), v.shape).copy()
    lo = v - c
    hi = v + c
    t = v.copy()
    for _ in range(_PROX_MAX_NEWTON):
        s = _expit(-y * t)
        g = t - v - c * y * s
        if np.max(np.abs(g)) <= _PROX_GRAD_TOL:
            break
        gp = 1.0 + c * s * (1.0 - s)
        lo = np.where(g < 0.0, t, lo)
        hi = np.where(g > 0.0, t, hi)
        step = t - g / gp
        inside = (step > lo) & (step < hi)
        t = np.where(inside, step, 0.5 * (lo + hi))
    return t if t.shape else float(t)


def bernstein_constants(kind: LossKind, *, bound: float | None = None,
                        margin: float | None = None,
                        density_bound: float | None = None) -> BernsteinConstants:
    """Curvature constants (kappa=1, A) for each loss family.

    logistic: predictions bounded by `bound` b >= 0 gives A = 4*exp(2b).
    hinge: conditional means bounded away from 1/2 by `margin` in (0,1]
    gives A = 1/(2*margin).
    quantile: conditional density >= 1/density_bound near the target quantile
    gives A = 2*density_bound.
    squared: returns (1, 1); the squared loss is outside the Lipschitz theory
    and this value is a placeholder convention, not a derived constant.
    """
    if kind.variant == LOGISTIC:
        if bound is None or bound < 0.0:
            raise ValueError("logistic loss needs a prediction bound b >= 0")
        return BernsteinConstants(1.0, 4.0 * math.exp(2.0 * bound))
    if kind.variant == HINGE:
        if margin is None or not (0.0 < margin <= 1.0):
            raise ValueError("hinge loss needs a margin in (0, 1]")
        return BernsteinConstants(1.0, 1.0 / (2.0 * margin))
    if kind.variant == QUANTILE:
        if density_bound is None or density_bound <= 0.0:
            raise ValueError("quantile loss needs a positive density bound")
        return BernsteinConstants(1.0, 2.0 * density_bound)
    return BernsteinConstants(1.0, 1.0)
