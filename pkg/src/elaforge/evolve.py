"""The search loops: population-based evolution and the zero-shot baseline.

Both methods spend a fixed budget of provider queries and persist every
evaluated candidate to a run directory.  Fitness is the feature-space
distance to the target, averaged over the configured search seeds; invalid
landscapes get an infinite sentinel and never enter the population.

Run directory layout::

    config.json                resolved search configuration
    target.json                normalized target vector
    bounds.json                normalization bounds
    log.jsonl                  one object per provider query
    candidates/<i>.fn          numpy-text source of candidate i
    candidates/<i>.meta.json   fitness, operator, lineage
    trajectory.csv             query_index -> best fitness so far

Log entries carry the query index rather than wall-clock timestamps so two
runs from the same scripted provider produce byte-identical archives.
"""

from __future__ import annotations

import json
import math
import random

from dataclasses import asdict, dataclass
from pathlib import Path

from . import dsl
from .ela import (
    Bounds,
    InvalidLandscape,
    NormalizedVector,
    SampleDesign,
    compute_features,
    distance,
    normalize,
)
from .llm import (
    Attempt,
    DEFAULT_REPAIR_RETRIES,
    PromptKind,
    QuerySession,
    prompt_hash,
)

SENTINEL = math.inf

DEFAULT_BUDGET = 250
DEFAULT_POPULATION = 20
DEFAULT_EXPLORATION_PARENTS = 5

SWEEP_ORDER = (
    PromptKind.E1,
    PromptKind.E2,
    PromptKind.M1,
    PromptKind.M2,
    PromptKind.M3,
)

METHODS = ("eotf", "zero_shot")


@dataclass(frozen=True)
class SearchConfig:
    method: str
    dim: int
    budget: int = DEFAULT_BUDGET
    population_size: int = DEFAULT_POPULATION
    exploration_parents: int = DEFAULT_EXPLORATION_PARENTS
    search_seeds: tuple[int, ...] = (0,)
    sample_n: int | None = None  # None -> 250 * dim
    rng_seed: int = 0
    repair_retries: int = DEFAULT_REPAIR_RETRIES

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.budget < 1:
            raise ValueError("budget must be positive")
        if not self.search_seeds:
            raise ValueError("need at least one search seed")
        if self.method == "eotf":
            if self.budget < self.population_size:
                raise ValueError("budget must cover initialization (budget >= N)")
            if not 2 <= self.exploration_parents <= self.population_size:
                raise ValueError("need N >= m >= 2")

    def to_dict(self) -> dict:
        payload = asdict(self)
        payload["search_seeds"] = list(self.search_seeds)
        return payload


@dataclass
class Candidate:
    typed: dsl.TypedProgram
    canonical_hash: str
    fitness: float
    operator: PromptKind
    parent_hashes: tuple[str, ...]
    query_index: int
    generation: int

    @property
    def valid(self) -> bool:
        return math.isfinite(self.fitness)

    def meta_dict(self) -> dict:
        return {
            "query_index": self.query_index,
            "generation": self.generation,
            "operator": self.operator.value,
            "canonical_hash": self.canonical_hash,
            "fitness": self.fitness if self.valid else None,
            "valid": self.valid,
            "parent_hashes": list(self.parent_hashes),
            "name": self.typed.name,
        }


def fitness(
    typed: dsl.TypedProgram,
    target: NormalizedVector,
    bounds: Bounds,
    search_seeds: tuple[int, ...],
    dim: int,
    n: int | None = None,
) -> float:
    """Mean feature distance over the search seeds; inf marks invalid."""
    total = 0.0
    for seed in search_seeds:
        design = SampleDesign(dim=dim, n=n, seed=seed)
        try:
            vector = compute_features(typed, design)
        except (InvalidLandscape, dsl.EvalError, RecursionError):
            return SENTINEL
        total += distance(normalize(vector, bounds), target)
    return total / len(search_seeds)


class Archive:
    """Persistent record of one search run."""

    def __init__(
        self,
        run_dir: str | Path,
        config: SearchConfig,
        target: NormalizedVector,
        bounds: Bounds,
    ):
        self.run_dir = Path(run_dir)
        self.config = config
        self.candidates: list[Candidate] = []
        self.trajectory: list[tuple[int, float]] = []
        self.best: Candidate | None = None

        self.run_dir.mkdir(parents=True, exist_ok=True)
        (self.run_dir / "candidates").mkdir(exist_ok=True)
        _write_json(self.run_dir / "config.json", config.to_dict())
        target_payload = target.to_dict()
        target_payload["dim"] = config.dim
        _write_json(self.run_dir / "target.json", target_payload)
        (self.run_dir / "bounds.json").write_text(bounds.to_json())
        self._log = (self.run_dir / "log.jsonl").open("w")
        self._trajectory = (self.run_dir / "trajectory.csv").open("w")
        self._trajectory.write("query_index,best_fitness\n")

    @property
    def best_fitness(self) -> float:
        return self.best.fitness if self.best is not None else SENTINEL

    def record_attempt(self, attempt: Attempt, extra: dict | None = None) -> None:
        entry = {
            "query_index": attempt.query_index,
            "kind": attempt.kind.value,
            "prompt_sha256": prompt_hash(attempt.prompt),
            "response": attempt.response,
            "outcome": attempt.outcome,
            "error": attempt.error,
        }
        if extra:
            entry.update(extra)
        self._log.write(json.dumps(entry, sort_keys=True) + "\n")
        self._log.flush()

    def record_candidate(self, candidate: Candidate) -> None:
        self.candidates.append(candidate)
        if candidate.valid and (self.best is None or candidate.fitness < self.best.fitness):
            self.best = candidate
        stem = self.run_dir / "candidates" / str(candidate.query_index)
        stem.with_suffix(".fn").write_text(dsl.render(candidate.typed.program, "numpy-text"))
        _write_json(stem.with_suffix(".meta.json"), candidate.meta_dict())

    def record_trajectory(self, query_index: int) -> None:
        best = self.best_fitness
        self.trajectory.append((query_index, best))
        self._trajectory.write(f"{query_index},{best!r}\n")
        self._trajectory.flush()

    def close(self) -> None:
        self._log.close()
        self._trajectory.close()


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def select_parents(
    population: list[Candidate], kind: PromptKind, rng: random.Random, m: int
) -> list[Candidate]:
    """Uniform draws: m distinct members for exploration, one for mutation."""
    if not population:
        raise ValueError("population is empty")
    if kind.is_exploration:
        if len(population) <= m:
            return list(population)
        return rng.sample(population, m)
    return [rng.choice(population)]


class _SearchRun:
    """Shared machinery for both methods: query, dedup, evaluate, persist."""

    def __init__(
        self,
        config: SearchConfig,
        provider,
        target: NormalizedVector,
        bounds: Bounds,
        run_dir: str | Path,
        dedupe: bool = True,
    ):
        if bounds.dim != config.dim:
            raise ValueError(f"bounds are for dim={bounds.dim}, run wants dim={config.dim}")
        if not target.fully_defined:
            raise ValueError("target vector has undefined slots")
        self.config = config
        self.target = target
        self.bounds = bounds
        self.archive = Archive(run_dir, config, target, bounds)
        self.session = QuerySession(provider, config.budget, config.repair_retries)
        self.rng = random.Random(config.rng_seed)
        self.dedupe = dedupe
        self.seen: dict[str, Candidate] = {}

    def step(
        self, kind: PromptKind, parents: list[Candidate], generation: int
    ) -> Candidate | None:
        """One operator application: query, then log/evaluate each attempt."""
        context = [p.typed.program for p in parents]
        outcome = self.session.query(kind, self.target, context)
        produced: Candidate | None = None

        for position, attempt in enumerate(outcome.attempts):
            extra: dict = {}
            final = position == len(outcome.attempts) - 1
            if final and outcome.ok:
                typed = outcome.typed
                _, digest = dsl.canonicalize(typed.program)
                known = self.seen.get(digest) if self.dedupe else None
                if known is not None:
                    extra = {
                        "outcome": "duplicate",
                        "canonical_hash": digest,
                        "duplicate_of": known.query_index,
                        "fitness": None,
                    }
                else:
                    value = fitness(
                        typed,
                        self.target,
                        self.bounds,
                        self.config.search_seeds,
                        self.config.dim,
                        self.config.sample_n,
                    )
                    produced = Candidate(
                        typed=typed,
                        canonical_hash=digest,
                        fitness=value,
                        operator=kind,
                        parent_hashes=tuple(p.canonical_hash for p in parents),
                        query_index=attempt.query_index,
                        generation=generation,
                    )
                    self.seen[digest] = produced
                    self.archive.record_candidate(produced)
                    extra = {
                        "canonical_hash": digest,
                        "fitness": value if produced.valid else None,
                        "valid": produced.valid,
                    }
            self.archive.record_attempt(attempt, extra)
            self.archive.record_trajectory(attempt.query_index)
        return produced


def run_eotf(
    config: SearchConfig,
    provider,
    run_dir: str | Path,
    target: NormalizedVector,
    bounds: Bounds,
) -> Archive:
    """Population search: N initialization queries, then operator sweeps.

    Each sweep applies E1, E2, M1, M2, M3 once, in that order; exploration
    operators see m uniformly drawn parents, mutations one.  Offspring are
    deduplicated by canonical hash and the population keeps the best N.
    """
    if config.method != "eotf":
        raise ValueError("config.method must be 'eotf'")
    run = _SearchRun(config, provider, target, bounds, run_dir)
    population: list[Candidate] = []

    def insert(candidate: Candidate | None) -> None:
        if candidate is None or not candidate.valid:
            return
        population.append(candidate)
        population.sort(key=lambda c: (c.fitness, c.query_index))
        del population[config.population_size:]

    try:
        for _ in range(config.population_size):
            if run.session.remaining <= 0:
                break
            insert(run.step(PromptKind.I1, [], generation=0))

        generation = 0
        while run.session.remaining > 0:
            generation += 1
            for kind in SWEEP_ORDER:
                if run.session.remaining <= 0:
                    break
                if population:
                    parents = select_parents(
                        population, kind, run.rng, config.exploration_parents
                    )
                    insert(run.step(kind, parents, generation))
                else:
                    # nothing valid yet: keep initializing rather than stalling
                    insert(run.step(PromptKind.I1, [], generation))
    finally:
        run.archive.close()
    return run.archive


def run_zero_shot(
    config: SearchConfig,
    provider,
    run_dir: str | Path,
    target: NormalizedVector,
    bounds: Bounds,
) -> Archive:
    """Budget-many independent context-free queries; no evolution.

    Generations are independent, so the archive keeps every evaluated
    candidate — repeats included, without eotf's dedup shortcut.
    """
    if config.method != "zero_shot":
        raise ValueError("config.method must be 'zero_shot'")
    run = _SearchRun(config, provider, target, bounds, run_dir, dedupe=False)
    try:
        while run.session.remaining > 0:
            run.step(PromptKind.I1, [], generation=0)
    finally:
        run.archive.close()
    return run.archive


def run_search(
    config: SearchConfig,
    provider,
    run_dir: str | Path,
    target: NormalizedVector,
    bounds: Bounds,
) -> Archive:
    runner = run_eotf if config.method == "eotf" else run_zero_shot
    return runner(config, provider, run_dir, target, bounds)


def load_log(run_dir: str | Path) -> list[dict]:
    with (Path(run_dir) / "log.jsonl").open() as handle:
        return [json.loads(line) for line in handle]


def load_trajectory(run_dir: str | Path) -> list[tuple[int, float]]:
    lines = (Path(run_dir) / "trajectory.csv").read_text().splitlines()[1:]
    rows = []
    for line in lines:
        index, value = line.split(",")
        rows.append((int(index), float(value)))
    return rows
