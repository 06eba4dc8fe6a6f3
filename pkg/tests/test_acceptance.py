"""Acceptance gate: one test per criterion, each printing a pass line.

Run with ``pytest tests/test_acceptance.py -v -s``.  The live-endpoint
check at the bottom is optional and only runs when the environment points
at a reachable chat-completion server.
"""

import json
import math
import os
import time
from pathlib import Path

import numpy as np
import pytest

from elaforge import dsl, ela, evalbench, evolve, targets
from elaforge.cli import scale_study
from elaforge.ela import NormalizedVector, SampleDesign
from elaforge.evolve import SearchConfig
from elaforge.llm import MockProvider

from test_ela import nbc_oracle


def _report(name: str) -> None:
    print(f"\nACCEPTANCE {name}: PASS")


def wrap(code: str) -> str:
    return f"```python\n{code}```\n"


def varied_program(i: int) -> str:
    c1 = 0.1 + 0.03 * i
    c2 = 0.2 + 0.01 * i
    return (
        "def problem(x):\n"
        f"    bowl = sum(x ** 2)\n"
        f"    ripple = {c1} * cos(x[0]) + {c2} * sin(x[1])\n"
        "    return bowl + ripple\n"
    )


@pytest.fixture(scope="module")
def shared_bounds():
    suite = [targets.builtin(name, 2) for name in ("sphere", "rastrigin", "ackley")]
    return targets.compute_bounds("acceptance", suite, dim=2, base_seed=0, seeds_per_problem=2)


@pytest.fixture(scope="module")
def sphere_target(shared_bounds):
    spec = targets.TargetSpec(kind="builtin", name="sphere", dim=2, seeds=(0,))
    return targets.compute_target_vector(spec, shared_bounds)


# --------------------------------------------------------------- criterion 1

def test_ela_oracle_suite():
    started = time.perf_counter()

    X = np.array([[0.0], [1.0], [3.0], [7.0]])
    y = np.array([4.0, 3.0, 2.0, 1.0])
    cor, sd_ratio = ela.nbc_features(X, y)
    assert abs(sd_ratio - 0.9258) <= 1e-4
    assert abs(cor - (-0.7746)) <= 1e-4

    rng = np.random.default_rng(2024)
    for _ in range(100):
        n = int(rng.integers(4, 13))
        d = int(rng.integers(1, 4))
        Xi = rng.uniform(-5, 5, size=(n, d))
        yi = rng.normal(size=n)
        got = ela.nbc_features(Xi, yi)
        want = nbc_oracle(Xi, yi)
        for g, w in zip(got, want):
            if math.isnan(w):
                assert math.isnan(g)
            else:
                assert abs(g - w) <= 1e-12

    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, f"took {elapsed:.1f}s"
    _report("ela-oracle-suite")


# --------------------------------------------------------------- criterion 2

def test_regression_suite():
    started = time.perf_counter()

    for dim in (1, 2, 3):
        rng = np.random.default_rng(dim)
        X = rng.uniform(-5, 5, size=(80, dim))
        for model in ela.REGRESSION_MODELS:
            p = ela.model_parameter_count(dim, model)
            coef = rng.normal(size=p + 1)
            y = ela._design_matrix(X, model) @ coef
            assert abs(ela.adj_r2(X, y, model) - 1.0) <= 1e-9, (dim, model)

    X3 = np.array([[-1.0], [0.0], [1.0]])
    assert abs(ela.adj_r2(X3, X3[:, 0] ** 2, "lin_simple") - (-1.0)) <= 1e-9

    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, f"took {elapsed:.1f}s"
    _report("regression-suite")


# --------------------------------------------------------------- criterion 3

def test_distance_metric_properties():
    started = time.perf_counter()
    rng = np.random.default_rng(99)
    triples = rng.uniform(-5, 5, size=(10_000, 3, 8))
    for row in triples:
        a = NormalizedVector(tuple(row[0]))
        b = NormalizedVector(tuple(row[1]))
        c = NormalizedVector(tuple(row[2]))
        assert ela.distance(a, a) <= 1e-12
        assert abs(ela.distance(a, b) - ela.distance(b, a)) <= 1e-12
        assert ela.distance(a, c) <= ela.distance(a, b) + ela.distance(b, c) + 1e-12
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, f"took {elapsed:.1f}s"
    _report("distance-metric-properties")


# --------------------------------------------------------------- criterion 4

def test_pipeline_determinism(tmp_path, shared_bounds, sphere_target):
    started = time.perf_counter()
    config = SearchConfig(
        method="eotf",
        dim=2,
        budget=30,
        population_size=20,
        exploration_parents=5,
        search_seeds=(0,),
        rng_seed=7,
    )  # sample_n None -> the full 250 * D rate

    def run(name: str) -> Path:
        run_dir = tmp_path / name
        provider = MockProvider([wrap(varied_program(i)) for i in range(30)])
        evolve.run_eotf(config, provider, run_dir, sphere_target, shared_bounds)
        return run_dir

    a, b = run("a"), run("b")
    files_a = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    assert files_a == files_b
    for rel in files_a:
        assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel

    kinds = [entry["kind"] for entry in evolve.load_log(a)]
    assert kinds == ["I1"] * 20 + ["E1", "E2", "M1", "M2", "M3"] * 2

    values = [v for _, v in evolve.load_trajectory(a)]
    assert all(x >= y - 1e-15 for x, y in zip(values, values[1:]))

    elapsed = time.perf_counter() - started
    assert elapsed < 120.0, f"took {elapsed:.1f}s"
    _report("pipeline-determinism")


# --------------------------------------------------------------- criterion 5

def test_search_effectiveness_oracle_level(tmp_path, shared_bounds, sphere_target):
    started = time.perf_counter()
    distractors = [
        "def problem(x):\n    return sum(abs(x)) + 0.3 * cos(x[0])\n",
        "def problem(x):\n    return exp(0.2 * x[0]) + sin(x[1])\n",
        "def problem(x):\n    return max(x) + 0.5 * min(x)\n",
        "def problem(x):\n    return norm2(x) + tanh(x[0])\n",
        "def problem(x):\n    return sum(x ** 4) - 3.0 * mean(x)\n",
        "def problem(x):\n    return abs(x[0]) * abs(x[1]) + x[0]\n",
        "def problem(x):\n    return sqrt(abs(x[0]) + 5.1) + x[1] ** 2\n",
        "def problem(x):\n    return sum(floor(x) ** 2) + 0.1 * x[0]\n",
        "def problem(x):\n    return cos(x[0]) * sin(x[1]) + 0.05 * sum(x ** 2)\n",
        "def problem(x):\n    return mean(x ** 3) + 2.0\n",
    ]
    quadratic = "def problem(x):\n    return sum(x ** 2)\n"
    responses = [wrap(s) for s in distractors[:5]] + [wrap(quadratic)] + [
        wrap(s) for s in distractors[5:]
    ]
    config = SearchConfig(
        method="zero_shot", dim=2, budget=len(responses), search_seeds=(0,), rng_seed=1
    )
    archive = evolve.run_zero_shot(
        config, MockProvider(responses), tmp_path / "run", sphere_target, shared_bounds
    )

    best = archive.best
    assert best is not None
    quad_hash = dsl.canonical_hash(dsl.parse(quadratic))
    assert best.canonical_hash == quad_hash
    for candidate in archive.candidates:
        if candidate.canonical_hash != quad_hash:
            assert best.fitness < candidate.fitness

    elapsed = time.perf_counter() - started
    assert elapsed < 120.0, f"took {elapsed:.1f}s"
    _report("search-effectiveness")


# --------------------------------------------------------------- criterion 6

MARKER = "0.424242"


class ContextKeyedProvider:
    """Good response only when the prompt carries evolved context."""

    def __init__(self):
        self.mediocre = wrap(
            "def problem(x):\n"
            f"    lure = {MARKER} * sum(abs(x))\n"
            "    return lure + exp(0.1 * x[0])\n"
        )
        self.good = wrap("def problem(x):\n    return sum(x ** 2)\n")

    def complete(self, prompt: str) -> str:
        return self.good if MARKER in prompt else self.mediocre


def test_context_flow_eotf_vs_zero_shot(tmp_path, shared_bounds, sphere_target):
    started = time.perf_counter()
    budget = 12

    zs_config = SearchConfig(
        method="zero_shot", dim=2, budget=budget, search_seeds=(0,), rng_seed=3
    )
    zs = evolve.run_zero_shot(
        zs_config, ContextKeyedProvider(), tmp_path / "zs", sphere_target, shared_bounds
    )

    eotf_config = SearchConfig(
        method="eotf",
        dim=2,
        budget=budget,
        population_size=6,
        exploration_parents=2,
        search_seeds=(0,),
        rng_seed=3,
    )
    ev = evolve.run_eotf(
        eotf_config, ContextKeyedProvider(), tmp_path / "ev", sphere_target, shared_bounds
    )

    assert zs.best is not None and ev.best is not None
    assert ev.best_fitness <= zs.best_fitness

    elapsed = time.perf_counter() - started
    assert elapsed < 120.0, f"took {elapsed:.1f}s"
    _report("context-flow-mechanism")


# --------------------------------------------------------------- criterion 7

def test_win_matrix_closure_and_75_percent():
    started = time.perf_counter()

    rng = np.random.default_rng(5)
    for _ in range(20):
        problems = [f"p{i}" for i in range(int(rng.integers(3, 30)))]
        medians = {
            m: {p: float(rng.choice([0.1, 0.2, 0.3, 0.4])) for p in problems}
            for m in ("A", "B", "C")
        }
        matrix = evalbench.win_matrix(medians)
        for i in range(3):
            for j in range(3):
                if i == j:
                    continue
                closure = (
                    matrix.wins[i, j] + matrix.wins[j, i] + matrix.ties[i, j]
                )
                assert closure == len(problems)

    a = {f"p{i}": (0.5 if i < 18 else 1.5) for i in range(24)}
    b = {f"p{i}": 1.0 for i in range(24)}
    matrix = evalbench.win_matrix({"A": a, "B": b})
    pct = matrix.percentage("A", "B")
    assert pct == 75.0
    print(f"18 of 24 problems -> {pct:.1f}%")

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0, f"took {elapsed:.2f}s"
    _report("win-matrix-closure")


# --------------------------------------------------------------- criterion 8

def test_optimizer_harness():
    started = time.perf_counter()

    def sphere(x):
        return float(np.sum(x * x))

    for kind in evalbench.OPTIMIZER_KINDS:
        calls = []

        def counted(x):
            calls.append(1)
            return sphere(x)

        result = evalbench.run_optimizer(kind, counted, dim=2, budget=500, seed=1)
        assert len(calls) == 500, kind
        assert result.evaluations == 500, kind

    hits = sum(
        evalbench.run_optimizer("de", sphere, dim=2, budget=2000, seed=seed).best_value
        <= 1e-3
        for seed in range(10)
    )
    assert hits >= 9, f"DE reached 1e-3 in only {hits}/10 seeds"

    assert abs(evalbench.friedman_statistic(np.array([1.0, 2.0]), 2) - 2.0) <= 1e-12

    elapsed = time.perf_counter() - started
    assert elapsed < 60.0, f"took {elapsed:.1f}s"
    _report("optimizer-harness")


# --------------------------------------------------------------- criterion 9

def test_scaling_harness(tmp_path):
    started = time.perf_counter()
    dims = (2, 3, 4, 5)

    # per-sample feature cost at the largest size, 250 * D points
    fn = targets.builtin("sphere", 5)
    tick = time.perf_counter()
    ela.compute_features_raw(fn, SampleDesign(dim=5, seed=0))
    per_sample = time.perf_counter() - tick
    assert per_sample < 2.0, f"feature computation took {per_sample:.2f}s per sample"

    bounds_dir = tmp_path / "bounds"
    bounds_dir.mkdir()
    for dim in dims:
        suite = [targets.builtin(n, dim) for n in ("sphere", "rastrigin")]
        bounds = targets.compute_bounds(
            "classic:sphere,rastrigin", suite, dim=dim, base_seed=0, seeds_per_problem=1
        )
        bounds.save(bounds_dir / f"bounds_d{dim}.json")

    transcript = [wrap(varied_program(i)) for i in range(3)]
    rows = scale_study(
        dims,
        "classic:sphere,rastrigin",
        bounds_dir,
        lambda: MockProvider(transcript),
        tmp_path / "runs",
        method="zero_shot",
        budget=3,
        rng_seed=0,
        target_seed_base=0,
        target_seed_count=1,
        resample_base=50_000,
        resample_count=3,
    )
    assert [dim for dim, _ in rows] == list(dims)
    for dim, value in rows:
        assert math.isfinite(value), f"dim {dim} produced no summary value"
        print(f"dim {dim}: average median distance {value:.4f}")

    # the runs really sampled at 250 * D
    config = json.loads((tmp_path / "runs" / "d5" / "00_classic_sphere" / "config.json").read_text())
    assert config["sample_n"] is None and config["dim"] == 5

    elapsed = time.perf_counter() - started
    print(f"scaling harness wall time {elapsed:.1f}s")
    _report("scaling-harness")


# ------------------------------------------------- criterion 10 (optional)

LIVE_BASE_URL = os.environ.get("ELAFORGE_LIVE_BASE_URL", "")


@pytest.mark.skipif(
    not LIVE_BASE_URL, reason="set ELAFORGE_LIVE_BASE_URL (and the API key) to run"
)
def test_live_endpoint_sphere_target(tmp_path):
    from elaforge.llm import HttpProvider, ProviderConfig

    dim = 2
    suite = [targets.builtin(name, dim) for name in targets.CLASSIC_NAMES]
    bounds = targets.compute_bounds("classic", suite, dim=dim, seeds_per_problem=5)
    spec = targets.TargetSpec(
        kind="builtin", name="sphere", dim=dim, seeds=tuple(range(100))
    )
    target = targets.compute_target_vector(spec, bounds)

    provider = HttpProvider(
        ProviderConfig(
            base_url=LIVE_BASE_URL,
            model=os.environ.get("ELAFORGE_LIVE_MODEL", "gpt-4o-mini"),
        )
    )
    config = SearchConfig(method="eotf", dim=dim, budget=250, search_seeds=(0,), rng_seed=0)
    archive = evolve.run_eotf(config, provider, tmp_path / "live", target, bounds)
    assert archive.best is not None

    stats = evalbench.resample_median(
        archive.best.typed,
        target,
        bounds,
        dim=dim,
        base_seed=1_000_000,
        count=100,
        forbidden_seeds=config.search_seeds,
    )
    print(f"live run: 100-seed median distance {stats.median:.4f}")
    assert stats.median <= 0.35
    _report("live-endpoint")
