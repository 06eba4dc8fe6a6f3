"""Derivative-free optimizer portfolio with exact evaluation budgets.

Every run performs exactly ``budget`` objective evaluations, enforced by a
counting wrapper: optimizers iterate until the wrapper signals exhaustion.
All randomness flows from the passed seed, so (kind, f, dim, budget, seed)
fully determines the trace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMIZER_KINDS = ("random_search", "nelder_mead", "de", "pso")

LOWER = -5.0
UPPER = 5.0


@dataclass(frozen=True)
class OptimizerResult:
    kind: str
    best_value: float
    best_point: np.ndarray
    trace: np.ndarray  # best-so-far after each evaluation, length == budget
    evaluations: int


class _Exhausted(Exception):
    pass


class _CountingObjective:
    """Wraps the raw objective; hard-stops at the budget and keeps the trace."""

    def __init__(self, fn, budget: int):
        self.fn = fn
        self.budget = budget
        self.spent = 0
        self.best_value = np.inf
        self.best_point: np.ndarray | None = None
        self.trace = np.empty(budget)

    def __call__(self, x: np.ndarray) -> float:
        if self.spent >= self.budget:
            raise _Exhausted
        value = float(self.fn(np.asarray(x, dtype=float)))
        if value < self.best_value or self.best_point is None:
            self.best_value = value
            self.best_point = np.array(x, dtype=float)
        self.trace[self.spent] = self.best_value
        self.spent += 1
        return value

    def drain(self, rng: np.random.Generator, dim: int) -> None:
        """Spend any leftover budget on uniform random points."""
        try:
            while True:
                self(rng.uniform(LOWER, UPPER, dim))
        except _Exhausted:
            pass


def run_optimizer(kind: str, f, dim: int, budget: int, seed: int) -> OptimizerResult:
    """Run one portfolio member for exactly ``budget`` evaluations."""
    if kind not in OPTIMIZER_KINDS:
        raise ValueError(f"unknown optimizer {kind!r}; choose from {OPTIMIZER_KINDS}")
    if budget < 1:
        raise ValueError("budget must be at least 1")
    counter = _CountingObjective(f, budget)
    rng = np.random.default_rng(seed)
    try:
        _DRIVERS[kind](counter, rng, dim)
    except _Exhausted:
        pass
    if counter.spent < budget:  # an optimizer returned early; never waste budget
        counter.drain(rng, dim)
    return OptimizerResult(
        kind=kind,
        best_value=counter.best_value,
        best_point=counter.best_point,
        trace=counter.trace.copy(),
        evaluations=counter.spent,
    )


# ----------------------------------------------------------- random search

def _random_search(counter: _CountingObjective, rng: np.random.Generator, dim: int):
    while True:
        counter(rng.uniform(LOWER, UPPER, dim))


# -------------------------------------------------------------------- DE

def _de(counter: _CountingObjective, rng: np.random.Generator, dim: int):
    """rand/1/bin with F = 0.5, CR = 0.9, population 10 * dim."""
    f_weight, crossover = 0.5, 0.9
    pop_size = 10 * dim
    population = rng.uniform(LOWER, UPPER, size=(pop_size, dim))
    values = np.array([counter(individual) for individual in population])

    while True:
        for i in range(pop_size):
            r1, r2, r3 = _distinct_indices(rng, pop_size, i)
            mutant = population[r1] + f_weight * (population[r2] - population[r3])
            cross = rng.random(dim) < crossover
            cross[rng.integers(dim)] = True
            trial = np.where(cross, mutant, population[i])
            np.clip(trial, LOWER, UPPER, out=trial)
            trial_value = counter(trial)
            if trial_value <= values[i]:
                population[i] = trial
                values[i] = trial_value


def _distinct_indices(rng: np.random.Generator, size: int, exclude: int):
    picks = []
    while len(picks) < 3:
        j = int(rng.integers(size))
        if j != exclude and j not in picks:
            picks.append(j)
    return picks


# ------------------------------------------------------------------- PSO

def _pso(counter: _CountingObjective, rng: np.random.Generator, dim: int):
    """Global-best PSO: omega = 0.729, c1 = c2 = 1.49445, |v| <= box width."""
    omega, c1, c2 = 0.729, 1.49445, 1.49445
    swarm_size = 10 * dim
    width = UPPER - LOWER

    position = rng.uniform(LOWER, UPPER, size=(swarm_size, dim))
    velocity = np.zeros((swarm_size, dim))
    personal_best = position.copy()
    personal_value = np.array([counter(p) for p in position])
    g = int(np.argmin(personal_value))

    while True:
        for i in range(swarm_size):
            r1 = rng.random(dim)
            r2 = rng.random(dim)
            velocity[i] = (
                omega * velocity[i]
                + c1 * r1 * (personal_best[i] - position[i])
                + c2 * r2 * (personal_best[g] - position[i])
            )
            np.clip(velocity[i], -width, width, out=velocity[i])
            position[i] = position[i] + velocity[i]
            np.clip(position[i], LOWER, UPPER, out=position[i])
            value = counter(position[i])
            if value < personal_value[i]:
                personal_value[i] = value
                personal_best[i] = position[i].copy()
                if value < personal_value[g]:
                    g = i


# ----------------------------------------------------------- Nelder-Mead

def _nelder_mead(counter: _CountingObjective, rng: np.random.Generator, dim: int):
    """Standard simplex search (1, 2, 0.5, 0.5) with random restarts."""
    alpha, gamma, rho, sigma = 1.0, 2.0, 0.5, 0.5
    tolerance = 1e-12

    while True:  # restart loop; leaves only via _Exhausted
        base = rng.uniform(LOWER, UPPER, dim)
        simplex = [base]
        for axis in range(dim):
            vertex = base.copy()
            vertex[axis] += 1.0
            simplex.append(vertex)
        simplex = np.array(simplex)
        values = np.array([counter(v) for v in simplex])

        while True:
            order = np.argsort(values, kind="stable")
            simplex = simplex[order]
            values = values[order]

            spread = values[-1] - values[0]
            diameter = np.max(np.abs(simplex[1:] - simplex[0]))
            if spread < tolerance and diameter < tolerance:
                break  # converged; restart from a fresh random simplex

            centroid = simplex[:-1].mean(axis=0)
            reflected = centroid + alpha * (centroid - simplex[-1])
            reflected_value = counter(reflected)

            if reflected_value < values[0]:
                expanded = centroid + gamma * (reflected - centroid)
                expanded_value = counter(expanded)
                if expanded_value < reflected_value:
                    simplex[-1], values[-1] = expanded, expanded_value
                else:
                    simplex[-1], values[-1] = reflected, reflected_value
            elif reflected_value < values[-2]:
                simplex[-1], values[-1] = reflected, reflected_value
            else:
                contracted = centroid + rho * (simplex[-1] - centroid)
                contracted_value = counter(contracted)
                if contracted_value < values[-1]:
                    simplex[-1], values[-1] = contracted, contracted_value
                else:
                    for i in range(1, len(simplex)):
                        simplex[i] = simplex[0] + sigma * (simplex[i] - simplex[0])
                        values[i] = counter(simplex[i])


_DRIVERS = {
    "random_search": _random_search,
    "de": _de,
    "pso": _pso,
    "nelder_mead": _nelder_mead,
}
