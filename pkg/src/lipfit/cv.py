"""K-fold cross-validation over a penalty grid for matrix and vector fits.

Folds are a seeded uniform partition of the sample indices.  Each fold is
fitted along the descending lambda path with warm starts; scores land in a
|grid| x K table.  The winner minimizes the mean held-out score, ties broken
toward the larger lambda.  Non-finite scores are kept as NaN in the table,
excluded from means, and counted.

Fold fits are independent; LIPFIT_THREADS > 1 runs them concurrently and the
result is identical to the sequential order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .losses import QUANTILE, LossKind, loss_value
from .matrix_admm import AdmmConfig, GaussianInit, MatrixProblem, WarmStart, admm_solve
from .simulation import sign_pm1
from .vector_solver import FistaConfig, L1Penalty, SlopePenalty, VectorProblem, prox_grad_solve

METRICS = ("misclassification", "mae", "mse", "pinball")


@dataclass
class CvResult:
    best_lambda: float
    lambdas: np.ndarray
    scores: np.ndarray            # |grid| x folds, NaN where non-finite
    mean_scores: np.ndarray
    n_nonfinite: int
    folds: int

    def table_csv(self) -> str:
        lines = ["lambda,fold,score"]
        for i, lam in enumerate(self.lambdas):
            for k in range(self.folds):
                lines.append(f"{lam!r},{k},{self.scores[i, k]!r}")
        return "\n".join(lines) + "\n"


def default_lambda_grid(center: float, num: int = 15, span: float = 20.0) -> np.ndarray:
    """Log-spaced grid of `num` values centered on `center`."""
    if center <= 0 or span <= 1 or num < 1:
        raise ValueError("need center > 0, span > 1, num >= 1")
    return np.geomspace(center / span, center * span, num)


def _score(metric: str, loss: LossKind, preds: np.ndarray, labels: np.ndarray) -> float:
    if metric == "misclassification":
        return float(np.mean(sign_pm1(preds) != sign_pm1(labels)))
    if metric == "mae":
        return float(np.mean(np.abs(preds - labels)))
    if metric == "mse":
        return float(np.mean((preds - labels) ** 2))
    tau = loss.tau if loss.variant == QUANTILE else 0.5
    return float(np.mean(loss_value(LossKind.quantile(tau), preds, labels)))


def _fold_assignment(rng: np.random.Generator, n: int, folds: int) -> list[np.ndarray]:
    return [np.sort(part) for part in np.array_split(rng.permutation(n), folds)]


def kfold_cv(problem: MatrixProblem | VectorProblem, lambda_grid, folds: int = 5,
             metric: str = "misclassification", seed: int = 0, *,
             admm: AdmmConfig = AdmmConfig(), fista: FistaConfig = FistaConfig(),
             warm_start: bool = True) -> CvResult:
    """Pick the penalty level by K-fold cross-validation.

    `admm` / `fista` configure the inner fits for matrix / vector problems
    respectively (the init of `admm` is reseeded per fold).
    """
    grid = np.asarray(lambda_grid, dtype=float)
    if grid.size == 0 or np.any(grid < 0):
        raise ValueError("lambda grid must be nonempty and nonnegative")
    if folds < 2:
        raise ValueError("need at least 2 folds")
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")

    if isinstance(problem, MatrixProblem):
        n = problem.data.n
        run_fold = _matrix_fold_runner(problem, admm, metric, seed, warm_start)
    else:
        n = problem.labels.size
        run_fold = _vector_fold_runner(problem, fista, metric, warm_start)
    if n < folds:
        raise ValueError(f"cannot split {n} samples into {folds} nonempty folds")

    rng = np.random.default_rng(seed)
    fold_idx = _fold_assignment(rng, n, folds)

    # descending path over distinct values; duplicates share the fitted score
    uniq = np.unique(grid)[::-1]
    scores = np.full((grid.size, folds), np.nan)

    def fill(fold: int):
        col = run_fold(uniq, fold_idx[fold], fold)
        for lam, sc in zip(uniq, col):
            scores[np.nonzero(grid == lam)[0], fold] = sc

    n_threads = max(1, int(os.environ.get("LIPFIT_THREADS", "1")))
    if n_threads > 1 and folds > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            list(pool.map(fill, range(folds)))
    else:
        for fold in range(folds):
            fill(fold)

    n_nonfinite = int(np.sum(~np.isfinite(scores)))
    with np.errstate(invalid="ignore"):
        finite = np.isfinite(scores)
        sums = np.where(finite, scores, 0.0).sum(axis=1)
        cnts = finite.sum(axis=1)
        mean_scores = np.where(cnts > 0, sums / np.maximum(cnts, 1), np.inf)

    best = np.min(mean_scores)
    winners = grid[mean_scores == best]
    return CvResult(float(winners.max()), grid, scores, mean_scores,
                    n_nonfinite, folds)


def _matrix_fold_runner(problem: MatrixProblem, admm: AdmmConfig, metric: str,
                        seed: int, warm_start: bool):
    data = problem.data

    def run(path: np.ndarray, test_idx: np.ndarray, fold: int) -> list[float]:
        mask = np.ones(data.n, dtype=bool)
        mask[test_idx] = False
        train = data.subset(np.nonzero(mask)[0])
        test = data.subset(test_idx)
        if test.n == 0 or train.n == 0:
            raise ValueError("empty fold")
        cfg = replace(admm, init=GaussianInit(seed + fold + 1))
        out: list[float] = []
        prev = None
        for lam in path:
            sub = MatrixProblem(train, problem.loss, float(lam), problem.box_bound)
            if warm_start and prev is not None:
                cfg = replace(admm, init=WarmStart(prev))
            rep = admm_solve(sub, cfg)
            prev = rep.estimate
            preds = rep.estimate.ravel()[test.flat_indices()]
            out.append(_score(metric, problem.loss, preds, test.values))
        return out

    return run


def _vector_fold_runner(problem: VectorProblem, fista: FistaConfig, metric: str,
                        warm_start: bool):
    def run(path: np.ndarray, test_idx: np.ndarray, fold: int) -> list[float]:
        mask = np.ones(problem.labels.size, dtype=bool)
        mask[test_idx] = False
        if not np.any(mask) or test_idx.size == 0:
            raise ValueError("empty fold")
        x_tr, y_tr = problem.design[mask], problem.labels[mask]
        x_te, y_te = problem.design[test_idx], problem.labels[test_idx]
        out: list[float] = []
        prev = None
        for lam in path:
            pen = (L1Penalty(float(lam)) if isinstance(problem.penalty, L1Penalty)
                   else SlopePenalty(float(lam), problem.penalty.weights))
            sub = VectorProblem(x_tr, y_tr, problem.loss, pen, problem.l2_radius)
            x0 = prev if warm_start else None
            rep = prox_grad_solve(sub, fista, x0=x0)
            prev = rep.estimate
            out.append(_score(metric, problem.loss, x_te @ rep.estimate, y_te))
        return out

    return run
