"""Pairwise method comparison by strict median-distance wins.

For each problem, method A beats method B when A's median resampled
distance is strictly lower; equal medians are ties.  An undefined (NaN)
median loses to any defined one and ties with another NaN, so closure
(wins + losses + ties = problems) holds even with non-robust entries.
Percentages are wins over the problem count, so 18 wins of 24 problems
reads 75.0.
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class WinMatrix:
    methods: tuple[str, ...]
    problems: tuple[str, ...]
    wins: np.ndarray  # wins[i, j]: problems where method i strictly beats j
    ties: np.ndarray

    def percentage(self, row: str, col: str) -> float:
        i = self.methods.index(row)
        j = self.methods.index(col)
        return 100.0 * float(self.wins[i, j]) / len(self.problems)

    def percentages(self) -> np.ndarray:
        out = 100.0 * self.wins.astype(float) / len(self.problems)
        np.fill_diagonal(out, np.nan)
        return out


def win_matrix(per_method_medians: dict[str, dict[str, float]]) -> WinMatrix:
    """Build the matrix from {method: {problem: median distance}}."""
    methods = tuple(per_method_medians)
    if len(methods) < 2:
        raise ValueError("need at least two methods")
    problem_sets = [tuple(sorted(per_method_medians[m])) for m in methods]
    if len(set(problem_sets)) != 1:
        raise ValueError("methods do not cover the same problem list")
    problems = problem_sets[0]

    k = len(methods)
    wins = np.zeros((k, k), dtype=int)
    ties = np.zeros((k, k), dtype=int)
    for i, a in enumerate(methods):
        for j, b in enumerate(methods):
            if i == j:
                continue
            for problem in problems:
                va = per_method_medians[a][problem]
                vb = per_method_medians[b][problem]
                if math.isnan(va) or math.isnan(vb):
                    if math.isnan(va) and math.isnan(vb):
                        ties[i, j] += 1
                    elif math.isnan(vb):
                        wins[i, j] += 1
                elif va < vb:
                    wins[i, j] += 1
                elif va == vb:
                    ties[i, j] += 1
    return WinMatrix(methods=methods, problems=problems, wins=wins, ties=ties)


def write_win_matrix_csv(matrix: WinMatrix, path: str | Path) -> None:
    lines = ["method_row,method_col,wins,ties,losses,problems,win_pct"]
    total = len(matrix.problems)
    for i, a in enumerate(matrix.methods):
        for j, b in enumerate(matrix.methods):
            if i == j:
                continue
            wins = int(matrix.wins[i, j])
            ties = int(matrix.ties[i, j])
            losses = total - wins - ties
            pct = 100.0 * wins / total
            lines.append(f"{a},{b},{wins},{ties},{losses},{total},{pct!r}")
    Path(path).write_text("\n".join(lines) + "\n")
