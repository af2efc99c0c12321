"""Closed-form evaluators for regularization levels, complexity functions,
sparsity-equation radii, and error-rate bounds.

Every non-explicit absolute constant is an explicit argument defaulting to 1;
the formulas are otherwise evaluated verbatim.  These are desk calculators:
in practice the penalty level is tuned by cross-validation (see `cv`).
"""

from __future__ import annotations

import math

BOUNDED_COMPLEXITY_CONST = 1920.0 / 7.0
MATRIX_LAMBDA_CONST = 720.0 / 7.0

RATE_KINDS = ("matrix_S2", "matrix_Sp", "matrix_excess", "lasso_lq",
              "slope_l2", "zhang_01")


def _check_dims(m: int, t: int, n: int):
    if m < 1 or t < 1 or n < 1:
        raise ValueError("dimensions and sample count must be >= 1")


def lambda_matrix(m: int, t: int, n: int, c0: float = 1.0) -> float:
    """Penalty level (c0*720/7) * sqrt(log(m+t) / (n*min(m,t))) for
    nuclear-norm-penalized completion of an m x t matrix from n samples."""
    _check_dims(m, t, n)
    return c0 * MATRIX_LAMBDA_CONST * math.sqrt(math.log(m + t) / (n * min(m, t)))


def lambda_lasso(p: int, n: int, const: float = 1.0) -> float:
    """Penalty level const * sqrt(log(p)/n) for the l1-penalized logistic fit."""
    if p < 1 or n < 1:
        raise ValueError("p and n must be >= 1")
    return const * math.sqrt(math.log(p) / n)


def lambda_slope(n: int, const: float = 1.0) -> float:
    """Penalty level const / sqrt(n) for the sorted-l1 penalized logistic fit."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return const / math.sqrt(n)


def complexity_r(setting: str, rho: float, *, n: int, a_const: float = 1.0,
                 complexity: float = 1.0, kappa: float = 1.0,
                 subgaussian_l: float = 1.0, const: float | None = None) -> float:
    """Complexity function r(rho) = (const * A * [L] * comp * rho / sqrt(n))^(1/(2 kappa)).

    `complexity` is the caller-supplied width of the regularizer's unit ball:
    a Gaussian mean width in the subgaussian setting (where the subgaussian
    factor L multiplies in and const defaults to 1), or a Rademacher
    complexity in the bounded setting (where const defaults to 1920/7).
    Non-decreasing in rho.
    """
    if setting not in ("subgaussian", "bounded"):
        raise ValueError(f"setting must be 'subgaussian' or 'bounded', got {setting!r}")
    if rho < 0:
        raise ValueError("rho must be >= 0")
    if n < 1 or a_const <= 0 or kappa < 1:
        raise ValueError("need n >= 1, a_const > 0, kappa >= 1")
    if const is None:
        const = 1.0 if setting == "subgaussian" else BOUNDED_COMPLEXITY_CONST
    core = const * a_const * complexity * rho / math.sqrt(n)
    if setting == "subgaussian":
        core *= subgaussian_l
    return core ** (1.0 / (2.0 * kappa))


def rademacher_bound_s1(m: int, t: int, c0: float = 1.0) -> float:
    """Upper bound c0 * sqrt(log(m+t)/min(m,t)) on the Rademacher complexity
    of the nuclear-norm unit ball under entrywise mask sampling."""
    if m < 1 or t < 1:
        raise ValueError("dimensions must be >= 1")
    return c0 * math.sqrt(math.log(m + t) / min(m, t))


def rho_star_matrix(s: int, m: int, t: int, n: int, kappa: float = 1.0,
                    const: float = 1.0) -> float:
    """Sparsity-equation radius for rank-s completion:
    const * (s*m*t)^(kappa/(2 kappa - 1)) * (log(m+t)/(n*min(m,t)))^(1/(2(2 kappa - 1)))."""
    _check_dims(m, t, n)
    if s < 1 or s > min(m, t):
        raise ValueError(f"rank s must be in [1, min(m,t)], got {s}")
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    e1 = kappa / (2.0 * kappa - 1.0)
    e2 = 1.0 / (2.0 * (2.0 * kappa - 1.0))
    return const * (s * m * t) ** e1 * (math.log(m + t) / (n * min(m, t))) ** e2


def rate_bound(kind: str, *, m: int | None = None, t: int | None = None,
               n: int | None = None, s: int | None = None, p: int | None = None,
               q: float | None = None, p_schatten: float | None = None,
               excess_hinge: float | None = None, kappa: float = 1.0,
               const: float = 1.0) -> float:
    """Evaluate one of the named error-rate bounds with caller constants.

    matrix_S2      sqrt-rate const*(s*max(m,t)*log(m+t)/n)^(1/(2(2k-1)))
    matrix_Sp      Schatten-p estimation rate, p_schatten in [1,2] (kappa=1 form)
    matrix_excess  const*(s*(m+t)*log(m+t)/n)^(k/(2k-1))
    lasso_lq       const*s^(1/q)*sqrt(log(p)/n), q in [1,2]
    slope_l2       const*sqrt((s/n)*log(e*p/s))
    zhang_01       const*excess_hinge (excess 0/1 risk from excess hinge risk)
    """
    if kind not in RATE_KINDS:
        raise ValueError(f"unknown rate kind {kind!r}; choose from {RATE_KINDS}")
    if kind == "zhang_01":
        if excess_hinge is None or excess_hinge < 0:
            raise ValueError("zhang_01 needs a nonnegative excess_hinge")
        return const * excess_hinge

    if kind in ("lasso_lq", "slope_l2"):
        if p is None or n is None or s is None:
            raise ValueError(f"{kind} needs s, p, n")
        if s < 1 or s > p:
            raise ValueError(f"sparsity s must be in [1, p], got {s}")
        if kind == "lasso_lq":
            if q is None or not (1.0 <= q <= 2.0):
                raise ValueError(f"q must be in [1, 2], got {q}")
            return const * s ** (1.0 / q) * math.sqrt(math.log(p) / n)
        return const * math.sqrt((s / n) * math.log(math.e * p / s))

    if m is None or t is None or n is None or s is None:
        raise ValueError(f"{kind} needs s, m, t, n")
    _check_dims(m, t, n)
    if s < 1 or s > min(m, t):
        raise ValueError(f"rank s must be in [1, min(m,t)], got {s}")
    if kind == "matrix_S2":
        core = s * max(m, t) * math.log(m + t) / n
        return const * core ** (1.0 / (2.0 * (2.0 * kappa - 1.0)))
    if kind == "matrix_excess":
        core = s * (m + t) * math.log(m + t) / n
        return const * core ** (kappa / (2.0 * kappa - 1.0))
    # matrix_Sp
    if p_schatten is None or not (1.0 <= p_schatten <= 2.0):
        raise ValueError(f"p_schatten must be in [1, 2], got {p_schatten}")
    ps = p_schatten
    return (const * s ** (1.0 / ps) * math.sqrt(math.log(m + t) / n)
            * max(m, t) ** (1.0 - 1.0 / ps) / min(m, t) ** (1.0 / ps - 0.5))
