"""Evaluation protocols: resampled distances, win matrices, optimizer ranking,
and grid export."""

from .grid import GridData, grid_render, write_grid_csv
from .optimizers import OPTIMIZER_KINDS, OptimizerResult, run_optimizer
from .ranking import (
    DEFAULT_BUDGET_MULTIPLIER,
    DEFAULT_REPETITIONS,
    RankTable,
    friedman_statistic,
    rank_portfolio,
    ranks_with_ties,
    spearman_rank_correlation,
    write_rank_csv,
)
from .resample import (
    DEFAULT_RESAMPLE_COUNT,
    ResampleStats,
    resample_median,
    write_resample_csv,
)
from .winmatrix import WinMatrix, win_matrix, write_win_matrix_csv

__all__ = [
    "DEFAULT_BUDGET_MULTIPLIER",
    "DEFAULT_REPETITIONS",
    "DEFAULT_RESAMPLE_COUNT",
    "GridData",
    "OPTIMIZER_KINDS",
    "OptimizerResult",
    "RankTable",
    "ResampleStats",
    "WinMatrix",
    "friedman_statistic",
    "grid_render",
    "rank_portfolio",
    "ranks_with_ties",
    "resample_median",
    "run_optimizer",
    "spearman_rank_correlation",
    "win_matrix",
    "write_grid_csv",
    "write_rank_csv",
    "write_resample_csv",
    "write_win_matrix_csv",
]
