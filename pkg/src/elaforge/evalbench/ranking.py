"""Fixed-budget optimizer ranking across a problem suite.

Each (problem, optimizer) cell is the median best value over repeated runs;
per-problem ranks average ties, and the Friedman chi-square summarizes how
far the mean ranks sit from the all-equal baseline:

    chi2 = 12 N / (k (k+1)) * (sum_j R_j^2 - k (k+1)^2 / 4)

with N problems, k optimizers, and R_j mean ranks.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .optimizers import OPTIMIZER_KINDS, run_optimizer

DEFAULT_BUDGET_MULTIPLIER = 10_000
DEFAULT_REPETITIONS = 5


@dataclass(frozen=True)
class RankTable:
    optimizers: tuple[str, ...]
    problems: tuple[str, ...]
    medians: np.ndarray  # problems x optimizers, median best value
    ranks: np.ndarray  # problems x optimizers, 1 = best, ties averaged
    mean_ranks: np.ndarray
    friedman_chi2: float


def ranks_with_ties(values: np.ndarray) -> np.ndarray:
    """Ascending ranks starting at 1; tied values share the average rank."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    ordered = values[order]
    while i < len(values):
        j = i
        while j + 1 < len(values) and ordered[j + 1] == ordered[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def friedman_statistic(mean_ranks: np.ndarray, n_problems: int) -> float:
    k = len(mean_ranks)
    r = np.asarray(mean_ranks, dtype=float)
    return float(
        12.0 * n_problems / (k * (k + 1)) * (np.sum(r**2) - k * (k + 1) ** 2 / 4.0)
    )


def spearman_rank_correlation(a: np.ndarray, b: np.ndarray) -> float:
    """Spearman correlation between two mean-rank vectors."""
    ra = ranks_with_ties(np.asarray(a))
    rb = ranks_with_ties(np.asarray(b))
    if np.all(ra == ra[0]) or np.all(rb == rb[0]):
        return float("nan")
    return float(np.corrcoef(ra, rb)[0, 1])


def _cell_seed(base_seed: int, problem: int, optimizer: int, repetition: int) -> int:
    seq = np.random.SeedSequence(base_seed, spawn_key=(problem, optimizer, repetition))
    return int(seq.generate_state(1)[0])


def rank_portfolio(
    problems: dict[str, object],
    dim: int,
    budget_multiplier: int = DEFAULT_BUDGET_MULTIPLIER,
    repetitions: int = DEFAULT_REPETITIONS,
    seed: int = 0,
    optimizers: tuple[str, ...] = OPTIMIZER_KINDS,
    workers: int = 1,
) -> RankTable:
    """Median-of-repetitions ranking of the portfolio over the suite.

    ``problems`` maps problem ids to point -> float objectives; each run
    gets ``budget_multiplier * dim`` evaluations.
    """
    if len(problems) < 2:
        raise ValueError("need at least two problems")
    if len(optimizers) < 2:
        raise ValueError("need at least two optimizers")
    unknown = set(optimizers) - set(OPTIMIZER_KINDS)
    if unknown:
        raise ValueError(f"unknown optimizers: {sorted(unknown)}")

    problem_ids = tuple(problems)
    budget = budget_multiplier * dim
    cells = [
        (pi, oi, rep)
        for pi in range(len(problem_ids))
        for oi in range(len(optimizers))
        for rep in range(repetitions)
    ]

    def one(cell) -> float:
        pi, oi, rep = cell
        f = problems[problem_ids[pi]]
        result = run_optimizer(
            optimizers[oi], f, dim, budget, _cell_seed(seed, pi, oi, rep)
        )
        return result.best_value

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            flat = list(pool.map(one, cells))
    else:
        flat = [one(cell) for cell in cells]

    values = np.asarray(flat).reshape(len(problem_ids), len(optimizers), repetitions)
    medians = np.median(values, axis=2)
    ranks = np.vstack([ranks_with_ties(row) for row in medians])
    mean_ranks = ranks.mean(axis=0)
    chi2 = friedman_statistic(mean_ranks, len(problem_ids))
    return RankTable(
        optimizers=tuple(optimizers),
        problems=problem_ids,
        medians=medians,
        ranks=ranks,
        mean_ranks=mean_ranks,
        friedman_chi2=chi2,
    )


def write_rank_csv(table: RankTable, path: str | Path) -> None:
    header = "problem," + ",".join(table.optimizers)
    lines = [header]
    for problem, row in zip(table.problems, table.ranks):
        lines.append(problem + "," + ",".join(repr(float(r)) for r in row))
    lines.append("mean_rank," + ",".join(repr(float(r)) for r in table.mean_ranks))
    lines.append(
        "friedman_chi2," + repr(table.friedman_chi2) + "," * (len(table.optimizers) - 1)
    )
    Path(path).write_text("\n".join(lines) + "\n")
