"""Grid export of a two-dimensional landscape for external contour plotting."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..ela import DEFAULT_LOWER, DEFAULT_UPPER


@dataclass(frozen=True)
class GridData:
    xs: np.ndarray  # cell-center coordinates, length r
    ys: np.ndarray
    values: np.ndarray  # shape (r, r); values[iy, ix] = f(xs[ix], ys[iy])


def grid_render(objective, resolution: int, dim: int = 2) -> GridData:
    """Evaluate on an r x r grid of cell centers over the working box."""
    if dim != 2:
        raise ValueError("grid export is only defined for dim = 2")
    if resolution < 1:
        raise ValueError("resolution must be positive")
    width = (DEFAULT_UPPER - DEFAULT_LOWER) / resolution
    centers = DEFAULT_LOWER + width * (np.arange(resolution) + 0.5)

    from ..ela import _evaluate_objective  # shared batch dispatch

    xx, yy = np.meshgrid(centers, centers)
    points = np.column_stack([xx.ravel(), yy.ravel()])
    values = _evaluate_objective(objective, points).reshape(resolution, resolution)
    return GridData(xs=centers, ys=centers, values=values)


def write_grid_csv(grid: GridData, path: str | Path) -> None:
    lines = ["x,y,value"]
    for iy, y in enumerate(grid.ys):
        for ix, x in enumerate(grid.xs):
            lines.append(f"{x!r},{y!r},{grid.values[iy, ix]!r}")
    Path(path).write_text("\n".join(lines) + "\n")
