"""Target problems: built-in classic functions, geometric hybrids of pairs,
suite-wide normalization bounds, and target feature vectors.

The built-in registry holds 24 classic analytic test functions, each finite
on the working box [-5, 5]^D with a known minimum value inside the box, so
any pair can be hybridized.  Targets can also come from candidate (.fn)
files or from a precomputed feature file.
"""

from __future__ import annotations

import json
import math
import sys

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import dsl
from .ela import (
    Bounds,
    ElaVector,
    FEATURE_NAMES,
    NormalizedVector,
    SampleDesign,
    compute_features_raw,
    normalize,
)

HYBRID_EPSILON = 1e-12
DEFAULT_ALPHA = 0.5
DEFAULT_TARGET_SEED_COUNT = 100


@dataclass(frozen=True)
class TargetFunction:
    """A target problem: deterministic evaluator plus metadata."""

    id: str
    dim: int
    evaluator: Callable[[np.ndarray], float]
    known_min: float | None = None

    def __call__(self, x: np.ndarray) -> float:
        return float(self.evaluator(np.asarray(x, dtype=float)))


# ----------------------------------------------------------- classic registry

def _sphere(x):
    return np.sum(x * x)


def _ellipsoid(x):
    d = x.size
    if d == 1:
        return x[0] * x[0]
    exponents = 6.0 * np.arange(d) / (d - 1)
    return np.sum(10.0**exponents * x * x)


def _rastrigin(x):
    return 10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x))


def _asymmetric_rastrigin(x):
    # even coordinates are stretched tenfold on their positive side; the
    # minimum stays at the origin because z = 0 iff x = 0
    z = x.copy()
    idx = np.arange(x.size) % 2 == 0
    z[idx & (x > 0)] *= 10.0
    return 10.0 * x.size + np.sum(z * z - 10.0 * np.cos(2.0 * np.pi * z))


def _linear_slope(x):
    d = x.size
    weights = 10.0 ** (np.arange(d) / max(d - 1, 1))
    return np.sum(weights * (5.0 - x))


def _rosenbrock(x):
    if x.size == 1:
        return (1.0 - x[0]) ** 2
    return np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2)


def _ackley(x):
    return (
        -20.0 * np.exp(-0.2 * np.sqrt(np.mean(x * x)))
        - np.exp(np.mean(np.cos(2.0 * np.pi * x)))
        + 20.0
        + np.e
    )


def _griewank(x):
    i = np.arange(1, x.size + 1)
    return 1.0 + np.sum(x * x) / 4000.0 - np.prod(np.cos(x / np.sqrt(i)))


def _schwefel_double_sum(x):
    partial = np.cumsum(x)
    return np.sum(partial * partial)


def _different_powers(x):
    d = x.size
    if d == 1:
        return abs(x[0]) ** 2
    exponents = 2.0 + 4.0 * np.arange(d) / (d - 1)
    return np.sum(np.abs(x) ** exponents)


def _sharp_ridge(x):
    if x.size == 1:
        return x[0] * x[0]
    return x[0] * x[0] + 100.0 * np.sqrt(np.sum(x[1:] * x[1:]))


def _schaffers_f7(x):
    if x.size == 1:
        s = np.array([abs(x[0])])
    else:
        s = np.sqrt(x[:-1] ** 2 + x[1:] ** 2)
    term = np.sqrt(s) + np.sqrt(s) * np.sin(50.0 * s**0.2) ** 2
    return (np.mean(term)) ** 2


def _weierstrass(x):
    k = np.arange(21)
    ak = 0.5**k
    bk = np.pi * 3.0**k
    inner = np.sum(ak[None, :] * np.cos(2.0 * bk[None, :] * (x[:, None] + 0.5)), axis=1)
    offset = np.sum(ak * np.cos(bk))
    return np.sum(inner) - x.size * offset


def _alpine(x):
    return np.sum(np.abs(x * np.sin(x) + 0.1 * x))


def _levy(x):
    w = 1.0 + (x - 1.0) / 4.0
    head = np.sin(np.pi * w[0]) ** 2
    if x.size == 1:
        return head + (w[0] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * w[0]) ** 2)
    mid = np.sum((w[:-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * w[:-1] + 1.0) ** 2))
    tail = (w[-1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * w[-1]) ** 2)
    return head + mid + tail


def _zakharov(x):
    i = np.arange(1, x.size + 1)
    linear = np.sum(0.5 * i * x)
    return np.sum(x * x) + linear**2 + linear**4


def _dixon_price(x):
    if x.size == 1:
        return (x[0] - 1.0) ** 2
    i = np.arange(2, x.size + 1)
    return (x[0] - 1.0) ** 2 + np.sum(i * (2.0 * x[1:] ** 2 - x[:-1]) ** 2)


def _sum_of_squares(x):
    i = np.arange(1, x.size + 1)
    return np.sum(i * x * x)


def _bent_cigar(x):
    if x.size == 1:
        return x[0] * x[0]
    return x[0] * x[0] + 1e6 * np.sum(x[1:] * x[1:])


def _discus(x):
    if x.size == 1:
        return x[0] * x[0]
    return 1e6 * x[0] * x[0] + np.sum(x[1:] * x[1:])


def _bohachevsky(x):
    if x.size == 1:
        return x[0] * x[0]
    a, b = x[:-1], x[1:]
    return np.sum(
        a * a
        + 2.0 * b * b
        - 0.3 * np.cos(3.0 * np.pi * a)
        - 0.4 * np.cos(4.0 * np.pi * b)
        + 0.7
    )


def _schaffer_f6_chain(x):
    if x.size == 1:
        s2 = np.array([x[0] * x[0]])
    else:
        s2 = x[:-1] ** 2 + x[1:] ** 2
    return np.sum(0.5 + (np.sin(np.sqrt(s2)) ** 2 - 0.5) / (1.0 + 0.001 * s2) ** 2)


def _step(x):
    return np.sum(np.floor(x + 0.5) ** 2)


def _katsuura(x):
    d = x.size
    k = np.arange(1, 33)
    two_k = 2.0**k
    frac = np.abs(two_k[None, :] * x[:, None] - np.round(two_k[None, :] * x[:, None]))
    inner = np.sum(frac / two_k[None, :], axis=1)
    i = np.arange(1, d + 1)
    return np.prod((1.0 + i * inner) ** (10.0 / d**1.2)) - 1.0


def _styblinski_tang(x):
    return 0.5 * np.sum(x**4 - 16.0 * x * x + 5.0 * x) - _STYBLINSKI_OFFSET * x.size


def _newton_styblinski_argmin() -> float:
    # stationary point of (t^4 - 16 t^2 + 5 t) / 2 near t = -2.9
    t = -2.9
    for _ in range(60):
        g = 2.0 * t**3 - 16.0 * t + 2.5
        h = 6.0 * t**2 - 16.0
        t -= g / h
    return t


_t_star = _newton_styblinski_argmin()
# per-coordinate minimum of the unshifted Styblinski-Tang term
_STYBLINSKI_OFFSET = 0.5 * (_t_star**4 - 16.0 * _t_star**2 + 5.0 * _t_star)


_CLASSIC_FUNCTIONS: dict[str, tuple[Callable[[np.ndarray], float], float]] = {
    "sphere": (_sphere, 0.0),
    "ellipsoid": (_ellipsoid, 0.0),
    "rastrigin": (_rastrigin, 0.0),
    "asymmetric_rastrigin": (_asymmetric_rastrigin, 0.0),
    "linear_slope": (_linear_slope, 0.0),
    "rosenbrock": (_rosenbrock, 0.0),
    "ackley": (_ackley, 0.0),
    "griewank": (_griewank, 0.0),
    "schwefel_double_sum": (_schwefel_double_sum, 0.0),
    "different_powers": (_different_powers, 0.0),
    "sharp_ridge": (_sharp_ridge, 0.0),
    "schaffers_f7": (_schaffers_f7, 0.0),
    "weierstrass": (_weierstrass, 0.0),
    "alpine": (_alpine, 0.0),
    "levy": (_levy, 0.0),
    "zakharov": (_zakharov, 0.0),
    "dixon_price": (_dixon_price, 0.0),
    "sum_of_squares": (_sum_of_squares, 0.0),
    "bent_cigar": (_bent_cigar, 0.0),
    "discus": (_discus, 0.0),
    "bohachevsky": (_bohachevsky, 0.0),
    "schaffer_f6_chain": (_schaffer_f6_chain, 0.0),
    "step": (_step, 0.0),
    "styblinski_tang": (_styblinski_tang, 0.0),
}

CLASSIC_NAMES = tuple(_CLASSIC_FUNCTIONS)


def builtin(name: str, dim: int) -> TargetFunction:
    """Look up a classic function by name at the given dimension."""
    if name not in _CLASSIC_FUNCTIONS:
        raise KeyError(
            f"unknown builtin {name!r}; available: {', '.join(CLASSIC_NAMES)}"
        )
    if dim < 1:
        raise ValueError("dim must be positive")
    fn, known_min = _CLASSIC_FUNCTIONS[name]
    return TargetFunction(id=f"classic/{name}", dim=dim, evaluator=fn, known_min=known_min)


def classic_suite(dim: int, names: tuple[str, ...] | None = None) -> list[TargetFunction]:
    return [builtin(name, dim) for name in (names or CLASSIC_NAMES)]


# ----------------------------------------------------------------- hybrids

def hybrid(fa: TargetFunction, fb: TargetFunction, alpha: float) -> TargetFunction:
    """Geometric log-space mix of two targets with known minima.

    h(x) = exp(alpha * ln(fa(x) - min_a + eps) + (1-alpha) * ln(fb(x) - min_b + eps))
    """
    if fa.dim != fb.dim:
        raise ValueError(f"dimension mismatch: {fa.dim} vs {fb.dim}")
    if fa.known_min is None or fb.known_min is None:
        raise ValueError("hybridization requires known minima on both parents")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")

    min_a, min_b = fa.known_min, fb.known_min
    eval_a, eval_b = fa.evaluator, fb.evaluator

    def mixed(x: np.ndarray) -> float:
        va = math.log(float(eval_a(x)) - min_a + HYBRID_EPSILON)
        vb = math.log(float(eval_b(x)) - min_b + HYBRID_EPSILON)
        return math.exp(alpha * va + (1.0 - alpha) * vb)

    # the mixed optimum is unknown unless the parents' optima coincide
    return TargetFunction(
        id=f"hybrid/{fa.id.rsplit('/', 1)[-1]}+{fb.id.rsplit('/', 1)[-1]}@{alpha:g}",
        dim=fa.dim,
        evaluator=mixed,
        known_min=None,
    )


def ring_suite(
    functions: list[TargetFunction],
    alpha: float = DEFAULT_ALPHA,
    require_24: bool = True,
) -> list[TargetFunction]:
    """Hybridize consecutive suite members cyclically: (1,2), (2,3), ..., (k,1)."""
    k = len(functions)
    if require_24 and k != 24:
        raise ValueError(f"the ring suite pairs exactly 24 functions, got {k}")
    if k < 2:
        raise ValueError("need at least 2 functions to pair")
    return [hybrid(functions[i], functions[(i + 1) % k], alpha) for i in range(k)]


def resolve_suite(spec: str, dim: int) -> tuple[str, list[TargetFunction]]:
    """Resolve a suite spec string to (suite id, functions).

    Accepted forms: ``classic``, ``classic:name1,name2``, ``ring``,
    ``ring:0.3``, or a directory of .fn files.
    """
    if spec == "classic":
        return spec, classic_suite(dim)
    if spec.startswith("classic:"):
        names = tuple(n.strip() for n in spec.split(":", 1)[1].split(",") if n.strip())
        return spec, classic_suite(dim, names)
    if spec == "ring" or spec.startswith("ring:"):
        alpha = DEFAULT_ALPHA
        if ":" in spec:
            alpha = float(spec.split(":", 1)[1])
        return spec, ring_suite(classic_suite(dim), alpha)
    path = Path(spec)
    if path.is_dir():
        functions = []
        for fn_path in sorted(path.glob("*.fn")):
            functions.append(load_dsl_target(fn_path, dim))
        if not functions:
            raise ValueError(f"no .fn files in {path}")
        return spec, functions
    raise ValueError(f"unknown suite spec {spec!r}")


def load_dsl_target(path: str | Path, dim: int) -> TargetFunction:
    """Wrap a candidate file as a target problem."""
    path = Path(path)
    typed = dsl.parse_typed(path.read_text())
    if typed.dim_hint is not None and typed.dim_hint > dim:
        raise ValueError(
            f"{path} needs at least {typed.dim_hint} dimensions, requested {dim}"
        )

    return TargetFunction(
        id=f"dsl/{path.stem}",
        dim=dim,
        evaluator=dsl.as_callable(typed),
        known_min=None,
    )


# ------------------------------------------------------------------- bounds

def compute_bounds(
    suite_id: str,
    functions: list[TargetFunction],
    dim: int,
    base_seed: int = 0,
    seeds_per_problem: int = 10,
    n: int | None = None,
    workers: int = 1,
) -> Bounds:
    """Per-feature min/max envelope over every (problem, seed) sample.

    Samples with undefined slots contribute only their defined slots; a
    feature undefined across every sample makes the suite unusable.
    """
    if not functions:
        raise ValueError("suite is empty")
    seeds = tuple(range(base_seed, base_seed + seeds_per_problem))
    jobs = [(fn, seed) for fn in functions for seed in seeds]

    def one(job) -> ElaVector:
        fn, seed = job
        design = SampleDesign(dim=dim, n=n, seed=seed)
        return compute_features_raw(fn, design)

    vectors = _ordered_map(one, jobs, workers)

    stacked = np.array([v.values for v in vectors], dtype=float)
    minima: list[float] = []
    maxima: list[float] = []
    for j, name in enumerate(FEATURE_NAMES):
        column = stacked[:, j]
        defined = column[~np.isnan(column)]
        if defined.size == 0:
            raise ValueError(f"feature {name} undefined across all samples")
        minima.append(float(defined.min()))
        maxima.append(float(defined.max()))
    return Bounds(
        suite=suite_id,
        dim=dim,
        seeds=seeds,
        minima=tuple(minima),
        maxima=tuple(maxima),
    )


def _ordered_map(fn, jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


# ------------------------------------------------------------- target specs

@dataclass(frozen=True)
class TargetSpec:
    """Where a target vector comes from and how it is sampled.

    ``source`` kinds: builtin, dsl-file, hybrid, feature-file.
    """

    kind: str
    dim: int
    name: str | None = None
    path: str | None = None
    hybrid_a: str | None = None
    hybrid_b: str | None = None
    alpha: float = DEFAULT_ALPHA
    seeds: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in ("builtin", "dsl-file", "hybrid", "feature-file"):
            raise ValueError(f"unknown target source {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.kind != "feature-file":
            if not self.seeds:
                object.__setattr__(
                    self, "seeds", tuple(range(DEFAULT_TARGET_SEED_COUNT))
                )
            if len(set(self.seeds)) != len(self.seeds):
                raise ValueError("seeds must be distinct")

    @classmethod
    def from_file(cls, path: str | Path) -> "TargetSpec":
        path = Path(path)
        if path.suffix == ".toml":
            if sys.version_info >= (3, 11):
                import tomllib
            else:
                import tomli as tomllib
            payload = tomllib.loads(path.read_text())
        else:
            payload = json.loads(path.read_text())
        return cls.from_dict(payload)

    @classmethod
    def from_dict(cls, payload: dict) -> "TargetSpec":
        source = payload["source"]
        seeds_cfg = payload.get("seeds", {})
        if isinstance(seeds_cfg, list):
            seeds = tuple(int(s) for s in seeds_cfg)
        else:
            base = int(seeds_cfg.get("base", 0))
            count = int(seeds_cfg.get("count", DEFAULT_TARGET_SEED_COUNT))
            seeds = tuple(range(base, base + count))
        return cls(
            kind=source["kind"],
            dim=int(payload["dim"]),
            name=source.get("id"),
            path=source.get("path"),
            hybrid_a=source.get("a"),
            hybrid_b=source.get("b"),
            alpha=float(source.get("alpha", DEFAULT_ALPHA)),
            seeds=seeds,
        )

    def resolve_function(self) -> TargetFunction:
        if self.kind == "builtin":
            return builtin(self.name, self.dim)
        if self.kind == "dsl-file":
            return load_dsl_target(self.path, self.dim)
        if self.kind == "hybrid":
            return hybrid(
                builtin(self.hybrid_a, self.dim),
                builtin(self.hybrid_b, self.dim),
                self.alpha,
            )
        raise ValueError("feature-file targets have no function to resolve")


def compute_target_vector(
    spec: TargetSpec,
    bounds: Bounds,
    n: int | None = None,
    workers: int = 1,
    max_invalid_fraction: float = 0.1,
) -> NormalizedVector:
    """Average raw features over the requested seeds, then normalize.

    Samples containing undefined slots are dropped; more than 10% dropped is
    an error.  Averaging happens in raw space, which commutes with the
    per-feature affine min-max scaling.
    """
    if spec.kind == "feature-file":
        return load_feature_file(spec.path, bounds)

    if bounds.dim != spec.dim:
        raise ValueError(f"bounds are for dim={bounds.dim}, target wants {spec.dim}")

    function = spec.resolve_function()

    def one(seed: int) -> ElaVector:
        design = SampleDesign(dim=spec.dim, n=n, seed=seed)
        return compute_features_raw(function, design)

    vectors = _ordered_map(one, list(spec.seeds), workers)
    valid = [v for v in vectors if v.fully_defined]
    dropped = len(vectors) - len(valid)
    if dropped > max_invalid_fraction * len(vectors):
        raise ValueError(
            f"{dropped}/{len(vectors)} samples had undefined features; "
            "target is not reliable"
        )
    if not valid:
        raise ValueError("no valid samples at all")
    mean_raw = ElaVector.from_array(
        np.mean(np.array([v.values for v in valid]), axis=0)
    )
    return normalize(mean_raw, bounds)


def load_feature_file(path: str | Path, bounds: Bounds) -> NormalizedVector:
    """Read a feature file; raw vectors are normalized with the given bounds."""
    payload = json.loads(Path(path).read_text())
    if "normalized" not in payload:
        raise ValueError(f"{path}: feature file must carry a 'normalized' flag")
    if payload["normalized"]:
        vector = NormalizedVector.from_dict(payload)
    else:
        vector = normalize(ElaVector.from_dict(payload), bounds)
    if not vector.fully_defined:
        raise ValueError(f"{path}: target vector has undefined slots")
    return vector


def save_target_vector(vector: NormalizedVector, path: str | Path, dim: int) -> None:
    payload = vector.to_dict()
    payload["dim"] = dim
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
