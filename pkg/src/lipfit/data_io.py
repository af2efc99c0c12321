"""Triplet-file ingestion (MovieLens-style), label transforms, splits, and
report serialization.

Triplet files hold one sample per line, tab- or comma-separated, columns
row/col/value with an optional trailing timestamp that is ignored.  Raw ids
are re-indexed densely; the returned mapping lets exports restore them.
Reports are flat "key: value" text documents, human-diffable and trivially
machine-parseable; iteration traces go to a separate CSV.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .matrix_admm import ObservationSet, SolverReport

TSV = "tsv"
CSV = "csv"
_SEPARATORS = {TSV: "\t", CSV: ","}


@dataclass(frozen=True)
class TripletFile:
    path: str
    format: str = TSV
    index_base: int = 1

    def __post_init__(self):
        if self.format not in _SEPARATORS:
            raise ValueError(f"format must be 'tsv' or 'csv', got {self.format!r}")
        if self.index_base not in (0, 1):
            raise ValueError("index base must be 0 or 1")


@dataclass(frozen=True)
class TripletData:
    """Observations with the dense re-indexing that produced them:
    row_ids[i] is the original id of grid row i, likewise col_ids."""

    observations: ObservationSet
    row_ids: np.ndarray
    col_ids: np.ndarray


def read_triplets(file: TripletFile) -> TripletData:
    """Parse a triplet file; duplicate (row, col) pairs stay as repeats.

    Malformed rows raise ValueError naming the line number; an empty file is
    an error.
    """
    sep = _SEPARATORS[file.format]
    raw_rows: list[int] = []
    raw_cols: list[int] = []
    values: list[float] = []
    with open(file.path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(sep)
            if len(parts) not in (3, 4):
                raise ValueError(
                    f"{file.path}:{lineno}: expected 3 or 4 columns, got {len(parts)}")
            try:
                raw_rows.append(int(parts[0]))
                raw_cols.append(int(parts[1]))
                values.append(float(parts[2]))
            except ValueError:
                raise ValueError(
                    f"{file.path}:{lineno}: malformed row {line!r}") from None
    if not values:
        raise ValueError(f"{file.path}: empty triplet file")

    row_ids, rows = np.unique(np.array(raw_rows), return_inverse=True)
    col_ids, cols = np.unique(np.array(raw_cols), return_inverse=True)
    obs = ObservationSet(row_ids.size, col_ids.size, rows, cols,
                         np.array(values, dtype=float))
    return TripletData(obs, row_ids, col_ids)


def export_triplets(obs: ObservationSet, path: str, format: str = TSV,
                    index_base: int = 1, row_ids: np.ndarray | None = None,
                    col_ids: np.ndarray | None = None) -> None:
    """Write one sample per line; ids are original ids when mappings are
    given, else dense indices shifted by index_base."""
    sep = _SEPARATORS[format]
    with open(path, "w", encoding="utf-8") as handle:
        for r, c, v in zip(obs.rows, obs.cols, obs.values):
            rid = int(row_ids[r]) if row_ids is not None else int(r) + index_base
            cid = int(col_ids[c]) if col_ids is not None else int(c) + index_base
            handle.write(f"{rid}{sep}{cid}{sep}{v:g}\n")


def binarize_ratings(obs: ObservationSet,
                     good: tuple[float, ...] = (4.0, 5.0)) -> ObservationSet:
    """Map ratings in `good` to +1 and everything else to -1."""
    values = np.where(np.isin(obs.values, good), 1.0, -1.0)
    return obs.with_values(values)


def train_test_split(obs: ObservationSet, test_fraction: float,
                     seed: int) -> tuple[ObservationSet, ObservationSet]:
    """Uniform sample split without replacement; |test| = floor(f * N)."""
    if not (0.0 <= test_fraction <= 1.0):
        raise ValueError("test fraction must be in [0,1]")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(obs.n)
    n_test = int(np.floor(test_fraction * obs.n))
    test_idx = np.sort(perm[:n_test])
    train_idx = np.sort(perm[n_test:])
    return obs.subset(train_idx), obs.subset(test_idx)


def inject_rating_outliers(obs: ObservationSet, from_value: float = 5.0,
                           to_value: float = 1.0, share: float = 0.2,
                           seed: int = 0) -> ObservationSet:
    """Rewrite exactly floor(share * count(from_value)) uniformly chosen
    samples carrying from_value to to_value."""
    if not (0.0 <= share <= 1.0):
        raise ValueError("share must be in [0,1]")
    candidates = np.nonzero(obs.values == from_value)[0]
    k = int(np.floor(share * candidates.size))
    rng = np.random.default_rng(seed)
    chosen = rng.choice(candidates, size=k, replace=False) if k else np.array([], dtype=int)
    values = obs.values.copy()
    values[chosen] = to_value
    return obs.with_values(values)


def write_report(report: SolverReport, metrics: dict, path: str,
                 traces_path: str | None = None) -> None:
    """Serialize a fit report as flat "key: value" lines.

    Config entries are echoed under config.*, metrics under metric.*.  When
    traces_path is given the per-iteration objective/residual pairs go there
    as CSV with header iter,objective,residual.
    """
    lines = ["report: lipfit"]
    for key in sorted(report.config):
        lines.append(f"config.{key}: {report.config[key]}")
    lines.append(f"lambda: {report.config.get('lambda', '')}")
    lines.append(f"iterations: {report.iterations}")
    lines.append(f"converged: {str(report.converged).lower()}")
    obj_final = report.objective_trace[-1] if report.objective_trace else float("nan")
    lines.append(f"objective_final: {obj_final!r}")
    lines.append(f"wall_time: {report.wall_time:.6f}")
    if report.feasibility is not None:
        lines.append(f"feasibility: {report.feasibility!r}")
    for key in sorted(metrics):
        lines.append(f"metric.{key}: {metrics[key]!r}")
    lines.append(f"traces_path: {traces_path if traces_path else ''}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")

    if traces_path is not None:
        n = len(report.residual_trace)
        obj_tail = report.objective_trace[-n:] if n else []
        with open(traces_path, "w", encoding="utf-8") as handle:
            handle.write("iter,objective,residual\n")
            for i, (o, r) in enumerate(zip(obj_tail, report.residual_trace), start=1):
                handle.write(f"{i},{o!r},{r!r}\n")


def read_report(path: str) -> dict[str, str]:
    """Parse a report written by write_report into a flat string dict."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for raw in handle:
            line = raw.rstrip("\n")
            if not line:
                continue
            key, _, val = line.partition(":")
            out[key.strip()] = val.strip()
    return out


def movielens_path() -> str | None:
    """Locate a MovieLens u.data file via $LIPFIT_MOVIELENS or ./data."""
    env = os.environ.get("LIPFIT_MOVIELENS")
    candidates = [env] if env else []
    candidates += ["data/u.data", "data/ml-100k/u.data"]
    for cand in candidates:
        if cand and os.path.exists(cand):
            return cand
    return None
