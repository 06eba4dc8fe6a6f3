"""Robustness check for a generated function: re-measure its feature
distance to the target over many fresh samples and summarize by quantiles.

Quantiles use linear interpolation of order statistics (numpy default), so
distances (0.1, 0.2, 0.3) give median 0.2, q25 0.15, q75 0.25.
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..ela import (
    Bounds,
    InvalidLandscape,
    NormalizedVector,
    SampleDesign,
    compute_features,
    distance,
    normalize,
)

DEFAULT_RESAMPLE_COUNT = 100


@dataclass(frozen=True)
class ResampleStats:
    seeds: tuple[int, ...]
    distances: tuple[float, ...]  # NaN marks an invalid draw
    median: float
    q25: float
    q75: float
    invalid_count: int
    robust: bool  # False once more than half the draws were invalid


def resample_median(
    objective,
    target: NormalizedVector,
    bounds: Bounds,
    dim: int,
    base_seed: int,
    count: int = DEFAULT_RESAMPLE_COUNT,
    n: int | None = None,
    forbidden_seeds: tuple[int, ...] = (),
    workers: int = 1,
) -> ResampleStats:
    """Distance statistics for one function over ``count`` fresh samples.

    ``forbidden_seeds`` are the seeds the search itself used; overlap with
    the evaluation seeds is refused so the check stays independent.
    """
    seeds = tuple(range(base_seed, base_seed + count))
    overlap = set(seeds) & set(forbidden_seeds)
    if overlap:
        raise ValueError(
            f"evaluation seeds overlap the search seeds: {sorted(overlap)}"
        )

    def one(seed: int) -> float:
        design = SampleDesign(dim=dim, n=n, seed=seed)
        try:
            vector = compute_features(objective, design)
        except InvalidLandscape:
            return float("nan")
        return distance(normalize(vector, bounds), target)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            distances = tuple(pool.map(one, seeds))
    else:
        distances = tuple(one(seed) for seed in seeds)

    values = np.asarray(distances)
    valid = values[~np.isnan(values)]
    invalid_count = len(distances) - valid.size
    if valid.size == 0:
        median = q25 = q75 = float("nan")
    else:
        q25, median, q75 = (float(np.quantile(valid, q)) for q in (0.25, 0.5, 0.75))
    return ResampleStats(
        seeds=seeds,
        distances=distances,
        median=median,
        q25=q25,
        q75=q75,
        invalid_count=invalid_count,
        robust=invalid_count * 2 <= len(distances),
    )


def write_resample_csv(stats: ResampleStats, path: str | Path) -> None:
    lines = ["seed,distance"]
    for seed, value in zip(stats.seeds, stats.distances):
        text = "nan" if math.isnan(value) else repr(value)
        lines.append(f"{seed},{text}")
    Path(path).write_text("\n".join(lines) + "\n")
