"""Synthetic completion scenarios and their error metrics.

Classification scenarios observe signs of a low-rank ground truth through
one of three noise channels (none, additive logistic, independent label
switching); quantile scenarios observe real entries through additive noise
plus occasional fixed-magnitude outliers.  Generation is deterministic per
(spec, seed): factor matrices are drawn first, then sample positions, then
noise, so specs differing only in noise share the same mask.

A scenario spec round-trips through a flat key=value config file.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix_admm import ObservationSet


@dataclass(frozen=True)
class Noiseless:
    pass


@dataclass(frozen=True)
class LogisticNoise:
    pass


@dataclass(frozen=True)
class SwitchNoise:
    p: float

    def __post_init__(self):
        if not (0.0 <= self.p < 1.0):
            raise ValueError("switch probability must be in [0,1)")


@dataclass(frozen=True)
class GaussianNoise:
    sigma: float

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")


@dataclass(frozen=True)
class StudentTNoise:
    df: float

    def __post_init__(self):
        if self.df <= 0:
            raise ValueError("degrees of freedom must be positive")


SIGN_SCENARIO = "sign"          # truth is a rank-r block matrix with entries in {-1,+1}
GAUSSIAN_SCENARIO = "gaussian"  # truth = the low-rank factor product itself


@dataclass(frozen=True)
class ScenarioSpec:
    n_rows: int
    n_cols: int
    rank: int
    kind: str
    sample_fraction: float
    noise: Noiseless | LogisticNoise | SwitchNoise
    seed: int

    def __post_init__(self):
        _check_common(self)
        if self.kind not in (SIGN_SCENARIO, GAUSSIAN_SCENARIO):
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if not isinstance(self.noise, (Noiseless, LogisticNoise, SwitchNoise)):
            raise ValueError("classification noise must be noiseless/logistic/switch")


@dataclass(frozen=True)
class QuantileScenarioSpec:
    n_rows: int
    n_cols: int
    rank: int
    sample_fraction: float
    noise: GaussianNoise | StudentTNoise
    outlier_magnitude: float
    outlier_share: float
    seed: int

    def __post_init__(self):
        _check_common(self)
        if not isinstance(self.noise, (GaussianNoise, StudentTNoise)):
            raise ValueError("quantile noise must be gaussian or student")
        if self.outlier_magnitude < 0:
            raise ValueError("outlier magnitude must be >= 0")
        if not (0.0 <= self.outlier_share < 1.0):
            raise ValueError("outlier share must be in [0,1)")


def _check_common(spec):
    if spec.n_rows < 1 or spec.n_cols < 1:
        raise ValueError("dimensions must be >= 1")
    if spec.rank < 1 or spec.rank > min(spec.n_rows, spec.n_cols):
        raise ValueError("rank must be in [1, min(rows, cols)]")
    if not (0.0 < spec.sample_fraction <= 1.0):
        raise ValueError("sample fraction must be in (0,1]")


def sign_pm1(x):
    """Sign with the convention sign(0) = +1."""
    return np.where(np.asarray(x) >= 0, 1.0, -1.0)


def _low_rank(rng, n_rows, n_cols, rank):
    left = rng.standard_normal((n_rows, rank))
    right = rng.standard_normal((n_cols, rank))
    return left @ right.T


def _block_sign_matrix(rng, n_rows, n_cols, rank):
    """{-1,+1} matrix of rank exactly `rank`: a nonsingular +-1 core expanded
    over balanced, randomly shuffled row and column clusters."""
    while True:
        core = np.where(rng.random((rank, rank)) < 0.5, -1.0, 1.0)
        if np.linalg.matrix_rank(core) == rank:
            break
    row_cluster = np.arange(n_rows) % rank
    rng.shuffle(row_cluster)
    col_cluster = np.arange(n_cols) % rank
    rng.shuffle(col_cluster)
    return core[np.ix_(row_cluster, col_cluster)]


def _sample_mask(rng, n_rows, n_cols, fraction):
    n = int(np.floor(fraction * n_rows * n_cols))
    flat = rng.choice(n_rows * n_cols, size=n, replace=False)
    return flat


def gen_classification(spec: ScenarioSpec):
    """Build (truth, train observations, unobserved flat indices).

    The sign scenario draws a rank-r {-1,+1} block matrix (the low-rank Bayes
    classifier case); the gaussian scenario keeps a Gaussian factor product,
    whose rank is r almost surely.  Labels: noiseless y = sign(truth);
    logistic y = sign(truth + Z) with Z standard logistic drawn by inverse
    CDF; switch flips the noiseless label independently with probability p.
    """
    rng = np.random.default_rng(spec.seed)
    if spec.kind == SIGN_SCENARIO:
        truth = _block_sign_matrix(rng, spec.n_rows, spec.n_cols, spec.rank)
    else:
        truth = _low_rank(rng, spec.n_rows, spec.n_cols, spec.rank)

    flat = _sample_mask(rng, spec.n_rows, spec.n_cols, spec.sample_fraction)
    clean = sign_pm1(truth.ravel()[flat])
    if isinstance(spec.noise, Noiseless):
        labels = clean
    elif isinstance(spec.noise, LogisticNoise):
        u = rng.random(flat.size)
        z = np.log(u) - np.log1p(-u)
        labels = sign_pm1(truth.ravel()[flat] + z)
    else:
        flip = rng.random(flat.size) < spec.noise.p
        labels = np.where(flip, -clean, clean)

    train = ObservationSet(spec.n_rows, spec.n_cols,
                           flat // spec.n_cols, flat % spec.n_cols, labels)
    test = np.setdiff1d(np.arange(spec.n_rows * spec.n_cols), flat)
    return truth, train, test


def gen_quantile(spec: QuantileScenarioSpec):
    """Build (truth, train observations, unobserved flat indices) for
    Y = truth + z + o * zeta, zeta in {-1, 0, +1} with P(zeta != 0) = share."""
    rng = np.random.default_rng(spec.seed)
    truth = _low_rank(rng, spec.n_rows, spec.n_cols, spec.rank)

    flat = _sample_mask(rng, spec.n_rows, spec.n_cols, spec.sample_fraction)
    if isinstance(spec.noise, GaussianNoise):
        z = spec.noise.sigma * rng.standard_normal(flat.size)
    else:
        z = rng.standard_t(spec.noise.df, flat.size)
    u = rng.random(flat.size)
    half = spec.outlier_share / 2.0
    zeta = np.where(u < half, -1.0, np.where(u >= 1.0 - half, 1.0, 0.0))
    values = truth.ravel()[flat] + z + spec.outlier_magnitude * zeta

    train = ObservationSet(spec.n_rows, spec.n_cols,
                           flat // spec.n_cols, flat % spec.n_cols, values)
    test = np.setdiff1d(np.arange(spec.n_rows * spec.n_cols), flat)
    return truth, train, test


def realized_rank(matrix: np.ndarray, tol: float = 1e-9) -> int:
    return int(np.linalg.matrix_rank(matrix, tol=tol))


def all_indices(n_rows: int, n_cols: int) -> np.ndarray:
    return np.arange(n_rows * n_cols)


def misclassification_rate(estimate: np.ndarray, truth: np.ndarray,
                           eval_set: np.ndarray) -> float:
    """Fraction of eval entries (flat indices) whose signs disagree."""
    eval_set = np.asarray(eval_set)
    if eval_set.size == 0:
        raise ValueError("evaluation set is empty")
    est = sign_pm1(np.asarray(estimate).ravel()[eval_set])
    tru = sign_pm1(np.asarray(truth).ravel()[eval_set])
    return float(np.mean(est != tru))


def l1_reconstruction(estimate: np.ndarray, truth: np.ndarray) -> float:
    """Mean absolute entrywise deviation over the whole grid."""
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimate.shape != truth.shape:
        raise ValueError("shape mismatch")
    return float(np.mean(np.abs(estimate - truth)))


def mse(estimate: np.ndarray, obs: ObservationSet) -> float:
    preds = np.asarray(estimate).ravel()[obs.flat_indices()]
    return float(np.mean((preds - obs.values) ** 2))


def mae(estimate: np.ndarray, obs: ObservationSet) -> float:
    preds = np.asarray(estimate).ravel()[obs.flat_indices()]
    return float(np.mean(np.abs(preds - obs.values)))


# -- flat key=value config round-trip ---------------------------------------

def scenario_to_config(spec: ScenarioSpec | QuantileScenarioSpec) -> str:
    lines = []
    if isinstance(spec, ScenarioSpec):
        lines.append("kind = classification")
        lines.append(f"scenario = {spec.kind}")
        noise = spec.noise
        if isinstance(noise, Noiseless):
            lines.append("noise = noiseless")
        elif isinstance(noise, LogisticNoise):
            lines.append("noise = logistic")
        else:
            lines.append(f"noise = switch:{noise.p:g}")
    else:
        lines.append("kind = quantile")
        noise = spec.noise
        if isinstance(noise, GaussianNoise):
            lines.append(f"noise = gaussian:{noise.sigma:g}")
        else:
            lines.append(f"noise = student:{noise.df:g}")
        lines.append(f"outlier_magnitude = {spec.outlier_magnitude:g}")
        lines.append(f"outlier_share = {spec.outlier_share:g}")
    lines.append(f"rows = {spec.n_rows}")
    lines.append(f"cols = {spec.n_cols}")
    lines.append(f"rank = {spec.rank}")
    lines.append(f"fraction = {spec.sample_fraction:g}")
    lines.append(f"seed = {spec.seed}")
    return "\n".join(lines) + "\n"


def scenario_from_config(text: str) -> ScenarioSpec | QuantileScenarioSpec:
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        fields[key.strip()] = val.strip()
    try:
        kind = fields["kind"]
        n_rows = int(fields["rows"])
        n_cols = int(fields["cols"])
        rank = int(fields["rank"])
        fraction = float(fields["fraction"])
        seed = int(fields["seed"])
        noise_txt = fields["noise"]
    except KeyError as exc:
        raise ValueError(f"missing config key: {exc.args[0]}") from None

    name, _, arg = noise_txt.partition(":")
    if kind == "classification":
        if name == "noiseless":
            noise = Noiseless()
        elif name == "logistic":
            noise = LogisticNoise()
        elif name == "switch":
            noise = SwitchNoise(float(arg))
        else:
            raise ValueError(f"unknown classification noise {noise_txt!r}")
        return ScenarioSpec(n_rows, n_cols, rank, fields.get("scenario", SIGN_SCENARIO),
                            fraction, noise, seed)
    if kind == "quantile":
        if name == "gaussian":
            noise = GaussianNoise(float(arg))
        elif name == "student":
            noise = StudentTNoise(float(arg))
        else:
            raise ValueError(f"unknown quantile noise {noise_txt!r}")
        return QuantileScenarioSpec(n_rows, n_cols, rank, fraction, noise,
                                    float(fields.get("outlier_magnitude", 0.0)),
                                    float(fields.get("outlier_share", 0.0)), seed)
    raise ValueError(f"unknown scenario kind {kind!r}")
