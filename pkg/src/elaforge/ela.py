"""Landscape feature extraction, normalization, and the feature-space metric.

Eight features are computed from one sample of (point, objective) pairs:
four adjusted-R² values of linear/quadratic surrogate fits, the skewness of
the objective values, two nearest-better-clustering statistics, and the
objective standard deviation.  Undefined feature slots are carried as NaN.

Conventions (all deliberate, see the per-function notes):
  * skewness is the population moment coefficient g1, no bias correction;
  * standard deviations use the (n-1) sample form everywhere;
  * nearest-better uses strictly-lower objective, equidistant neighbors
    break ties toward the smallest index, and sample-best points are
    excluded from the nearest-better statistics.
"""

from __future__ import annotations

import json
import math

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

# Fixed feature order; identical everywhere a vector is serialized.
FEATURE_NAMES = (
    "ela_meta.lin_simple.adj_r2",
    "ela_meta.lin_w_interact.adj_r2",
    "ela_meta.quad_simple.adj_r2",
    "ela_meta.quad_w_interact.adj_r2",
    "ela_distr.skewness",
    "nbc.nb_fitness.cor",
    "nbc.nn_nb.sd_ratio",
    "fitness_distance.fitness_std",
)

N_FEATURES = len(FEATURE_NAMES)

REGRESSION_MODELS = ("lin_simple", "lin_interact", "quad_simple", "quad_interact")

SAMPLES_PER_DIM = 250  # default sampling rate: 250 * D points per sample

DEFAULT_LOWER = -5.0
DEFAULT_UPPER = 5.0


class InvalidLandscape(Exception):
    """Raised when a sampled landscape yields no fully-defined feature vector."""


@dataclass(frozen=True)
class SampleDesign:
    """Deterministic recipe for one landscape sample."""

    dim: int
    n: int | None = None
    seed: int = 0
    scheme: str = "uniform-iid"
    lower: float = DEFAULT_LOWER
    upper: float = DEFAULT_UPPER

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.scheme != "uniform-iid":
            raise ValueError(f"unknown sampling scheme {self.scheme!r}")
        if self.upper <= self.lower:
            raise ValueError("upper must exceed lower")
        if self.n is None:
            object.__setattr__(self, "n", SAMPLES_PER_DIM * self.dim)
        d = self.dim
        minimum = 8 * (d * (d - 1) // 2) + 2 * d + 2
        if self.n < minimum:
            raise ValueError(
                f"n={self.n} too small for dim={d}; need at least {minimum} "
                "so the full quadratic model is over-determined"
            )


def draw_sample(design: SampleDesign) -> np.ndarray:
    """I.i.d. uniform points in the design box; pure function of the design."""
    rng = np.random.default_rng(design.seed)
    return rng.uniform(design.lower, design.upper, size=(design.n, design.dim))


@dataclass(frozen=True)
class ElaVector:
    """Raw feature values in FEATURE_NAMES order; NaN marks an undefined slot."""

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != N_FEATURES:
            raise ValueError(f"expected {N_FEATURES} features, got {len(self.values)}")

    @property
    def defined(self) -> tuple[bool, ...]:
        return tuple(not math.isnan(v) for v in self.values)

    @property
    def fully_defined(self) -> bool:
        return all(self.defined)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def to_dict(self) -> dict[str, float | None]:
        return {
            name: (None if math.isnan(v) else v)
            for name, v in zip(FEATURE_NAMES, self.values)
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ElaVector":
        missing = [name for name in FEATURE_NAMES if name not in data]
        if missing:
            raise ValueError(f"feature vector missing keys: {missing}")
        values = tuple(
            float("nan") if data[name] is None else float(data[name])
            for name in FEATURE_NAMES
        )
        return cls(values)

    @classmethod
    def from_array(cls, values: np.ndarray) -> "ElaVector":
        return cls(tuple(float(v) for v in values))


@dataclass(frozen=True)
class Bounds:
    """Per-feature (min, max) envelope for one (suite, dim) pair."""

    suite: str
    dim: int
    seeds: tuple[int, ...]
    minima: tuple[float, ...]
    maxima: tuple[float, ...]

    def __post_init__(self):
        if len(self.minima) != N_FEATURES or len(self.maxima) != N_FEATURES:
            raise ValueError("bounds must cover all features")
        for name, lo, hi in zip(FEATURE_NAMES, self.minima, self.maxima):
            if lo > hi:
                raise ValueError(f"min > max for {name}")

    @property
    def seeds_used(self) -> int:
        return len(self.seeds)

    def to_json(self) -> str:
        payload = {
            "suite": self.suite,
            "dim": self.dim,
            "seeds": list(self.seeds),
            "features": {
                name: {"min": lo, "max": hi}
                for name, lo, hi in zip(FEATURE_NAMES, self.minima, self.maxima)
            },
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Bounds":
        payload = json.loads(text)
        features = payload["features"]
        return cls(
            suite=payload["suite"],
            dim=int(payload["dim"]),
            seeds=tuple(int(s) for s in payload["seeds"]),
            minima=tuple(float(features[name]["min"]) for name in FEATURE_NAMES),
            maxima=tuple(float(features[name]["max"]) for name in FEATURE_NAMES),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path: str | Path) -> "Bounds":
        return cls.from_json(Path(path).read_text())


@dataclass(frozen=True)
class NormalizedVector:
    """Min-max scaled feature vector; values outside [0, 1] are kept as-is."""

    values: tuple[float, ...]
    degenerate: tuple[bool, ...] = field(default=(False,) * N_FEATURES)

    def __post_init__(self):
        if len(self.values) != N_FEATURES or len(self.degenerate) != N_FEATURES:
            raise ValueError(f"expected {N_FEATURES} slots")

    @property
    def defined(self) -> tuple[bool, ...]:
        return tuple(not math.isnan(v) for v in self.values)

    @property
    def fully_defined(self) -> bool:
        return all(self.defined)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def to_dict(self) -> dict:
        payload: dict = {
            name: (None if math.isnan(v) else v)
            for name, v in zip(FEATURE_NAMES, self.values)
        }
        payload["normalized"] = True
        return payload

    @classmethod
    def from_dict(cls, data: dict) -> "NormalizedVector":
        values = tuple(
            float("nan") if data[name] is None else float(data[name])
            for name in FEATURE_NAMES
        )
        return cls(values)


# ------------------------------------------------------------------ features

def _design_matrix(X: np.ndarray, model: str) -> np.ndarray:
    n, d = X.shape
    columns = [np.ones(n), X]
    if model in ("quad_simple", "quad_interact"):
        columns.append(X * X)
    if model in ("lin_interact", "quad_interact"):
        pairs = [X[:, i] * X[:, j] for i in range(d) for j in range(i + 1, d)]
        if pairs:
            columns.append(np.column_stack(pairs))
    return np.column_stack(columns)


def model_parameter_count(dim: int, model: str) -> int:
    """Number of non-intercept parameters p for the given surrogate class."""
    interact = dim * (dim - 1) // 2
    return {
        "lin_simple": dim,
        "lin_interact": dim + interact,
        "quad_simple": 2 * dim,
        "quad_interact": 2 * dim + interact,
    }[model]


def adj_r2(X: np.ndarray, y: np.ndarray, model: str) -> float:
    """Adjusted R² of an OLS fit with intercept; NaN when undefined.

    Undefined cases: constant y, or a rank-deficient design matrix.
    """
    if model not in REGRESSION_MODELS:
        raise ValueError(f"unknown model {model!r}")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    p = model_parameter_count(X.shape[1], model)
    if n <= p + 1:
        raise ValueError(f"need n > p + 1 = {p + 1} observations, got {n}")

    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return float("nan")

    design = _design_matrix(X, model)
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        return float("nan")
    residuals = y - design @ coef
    r2 = 1.0 - float(np.sum(residuals**2)) / ss_tot
    return 1.0 - (1.0 - r2) * (n - 1) / (n - p - 1)


def skewness(y: np.ndarray) -> float:
    """Moment-coefficient skewness g1 = m3 / m2^(3/2); NaN for constant y."""
    y = np.asarray(y, dtype=float)
    if y.size < 3:
        raise ValueError("need at least 3 observations")
    centered = y - y.mean()
    m2 = float(np.mean(centered**2))
    if m2 == 0.0:
        return float("nan")
    m3 = float(np.mean(centered**3))
    return m3 / m2**1.5


def fitness_std(y: np.ndarray) -> float:
    """Sample standard deviation of the objective values, (n-1) denominator."""
    y = np.asarray(y, dtype=float)
    if y.size < 2:
        raise ValueError("need at least 2 observations")
    return float(np.std(y, ddof=1))


def nbc_features(X: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Nearest-better clustering pair (fitness/in-degree correlation, sd ratio).

    For every point, nn is the distance to its nearest neighbor and nb the
    distance to its nearest strictly-better neighbor; points without a
    strictly better one are excluded from the nb statistics.  The pair is
    (NaN, NaN) when sd(nb) is zero, the in-degree is constant, or fewer
    than 3 points have a defined nb.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    if n < 4:
        raise ValueError("need at least 4 points")

    sq_norms = np.sum(X * X, axis=1)
    d2 = sq_norms[:, None] + sq_norms[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    dist = np.sqrt(d2)
    np.fill_diagonal(dist, np.inf)

    nn = dist.min(axis=1)

    better = y[None, :] < y[:, None]  # better[i, j]: j strictly improves on i
    masked = np.where(better, dist, np.inf)
    nb = masked.min(axis=1)
    has_nb = np.isfinite(nb)
    if int(has_nb.sum()) < 3:
        return float("nan"), float("nan")

    sd_nn = float(np.std(nn, ddof=1))
    sd_nb = float(np.std(nb[has_nb], ddof=1))
    if sd_nb == 0.0:
        return float("nan"), float("nan")
    sd_ratio = sd_nn / sd_nb

    # argmin breaks distance ties toward the smallest index
    targets = masked.argmin(axis=1)
    in_degree = np.zeros(n)
    np.add.at(in_degree, targets[has_nb], 1.0)

    if np.all(in_degree == in_degree[0]) or np.all(y == y[0]):
        return float("nan"), float("nan")
    cor_matrix = np.corrcoef(y, in_degree)
    cor = float(cor_matrix[0, 1])
    return cor, sd_ratio


def compute_features_raw(objective, design: SampleDesign) -> ElaVector:
    """All 8 features for one sample; undefined slots come back as NaN.

    ``objective`` is either a typed DSL program or any callable mapping a
    point to a float.  A sample containing non-finite objective values
    yields an all-NaN vector.
    """
    X = draw_sample(design)
    y = _evaluate_objective(objective, X)
    if not np.all(np.isfinite(y)):
        return ElaVector((float("nan"),) * N_FEATURES)

    cor, sd_ratio = nbc_features(X, y)
    values = (
        adj_r2(X, y, "lin_simple"),
        adj_r2(X, y, "lin_interact"),
        adj_r2(X, y, "quad_simple"),
        adj_r2(X, y, "quad_interact"),
        skewness(y),
        cor,
        sd_ratio,
        fitness_std(y),
    )
    return ElaVector(values)


def compute_features(objective, design: SampleDesign) -> ElaVector:
    """Like compute_features_raw but a fully-defined vector is required."""
    vector = compute_features_raw(objective, design)
    if not vector.fully_defined:
        undefined = [
            name for name, ok in zip(FEATURE_NAMES, vector.defined) if not ok
        ]
        raise InvalidLandscape(f"undefined features: {', '.join(undefined)}")
    return vector


def _evaluate_objective(objective, X: np.ndarray) -> np.ndarray:
    batch = getattr(objective, "evaluate_batch", None)
    if callable(batch):
        return np.asarray(batch(X).values, dtype=float)
    from . import dsl  # local import to avoid a cycle at module load

    if isinstance(objective, dsl.TypedProgram):
        return dsl.evaluate_batch(objective, X).values
    return np.asarray([float(objective(row)) for row in X], dtype=float)


# -------------------------------------------------------------- normalization

def normalize(raw: ElaVector, bounds: Bounds) -> NormalizedVector:
    """Min-max scale a raw vector; no clipping, degenerate bounds map to 0."""
    values: list[float] = []
    degenerate: list[bool] = []
    for v, lo, hi in zip(raw.values, bounds.minima, bounds.maxima):
        if math.isnan(v):
            values.append(float("nan"))
            degenerate.append(False)
        elif hi == lo:
            values.append(0.0)
            degenerate.append(True)
        else:
            values.append((v - lo) / (hi - lo))
            degenerate.append(False)
    return NormalizedVector(tuple(values), tuple(degenerate))


def distance(a: NormalizedVector, b: NormalizedVector) -> float:
    """Euclidean distance between two fully-defined normalized vectors."""
    if not a.fully_defined or not b.fully_defined:
        raise ValueError("distance requires fully defined vectors")
    return float(np.linalg.norm(a.as_array() - b.as_array()))
