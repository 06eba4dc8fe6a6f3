"""Command-line entry point.

Subcommands cover the full pipeline: ``bounds`` and ``target`` prepare the
normalization envelope and the target vector, ``evolve`` runs a search
against a provider, ``resample``/``winmatrix``/``rank``/``grid`` implement
the evaluation protocols, ``export``/``validate`` handle candidate files,
and ``scale-study`` sweeps the whole pipeline across dimensions.

Every run writes a manifest (version, resolved configuration, input file
hashes, timestamps) before doing any work.  All randomness comes from
explicit --seed flags.  Exit codes: 0 success, 1 usage error, 2 runtime
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time

from pathlib import Path

import numpy as np

from . import __version__, dsl, evalbench, evolve, targets
from .ela import Bounds, ElaVector, SampleDesign, compute_features_raw, normalize
from .evolve import SearchConfig
from .llm import HttpProvider, MockProvider, ProviderConfig, ProviderError


class UsageError(Exception):
    pass


class RuntimeFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 1."""

    def error(self, message):
        raise UsageError(message)


# ------------------------------------------------------------------ manifest

def _hash_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class Manifest:
    def __init__(self, subcommand: str, config: dict, inputs: list[Path], path: Path):
        self.path = path
        self.payload = {
            "version": __version__,
            "subcommand": subcommand,
            "config": config,
            "input_hashes": {str(p): _hash_file(Path(p)) for p in inputs},
            "started_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "finished_at": None,
        }
        self._write()

    def _write(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(json.dumps(self.payload, indent=2, sort_keys=True) + "\n")

    def finish(self):
        self.payload["finished_at"] = time.strftime(
            "%Y-%m-%dT%H:%M:%SZ", time.gmtime()
        )
        self._write()


def _manifest_for_output(subcommand: str, config: dict, inputs: list[str], out: str) -> Manifest:
    out_path = Path(out)
    if out_path.suffix:  # file output -> sibling manifest
        manifest_path = out_path.with_name(out_path.name + ".manifest.json")
    else:
        manifest_path = out_path / "manifest.json"
    existing = [Path(p) for p in inputs if p and Path(p).is_file()]
    return Manifest(subcommand, config, existing, manifest_path)


# ----------------------------------------------------------------- utilities

def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated integer list, got {text!r}") from exc


def _load_bounds(path: str) -> Bounds:
    try:
        return Bounds.load(path)
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        raise RuntimeFailure(f"cannot load bounds from {path}: {exc}") from exc


def _load_target(path: str, bounds: Bounds, dim: int):
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise RuntimeFailure(f"cannot load target from {path}: {exc}") from exc
    if "dim" in payload and int(payload["dim"]) != dim:
        raise RuntimeFailure(
            f"target {path} is for dim={payload['dim']}, run wants dim={dim}"
        )
    try:
        return targets.load_feature_file(path, bounds)
    except ValueError as exc:
        raise RuntimeFailure(str(exc)) from exc


def _make_provider_factory(args):
    if args.provider == "mock":
        if not args.transcript:
            raise UsageError("--provider mock requires --transcript")
        transcript_path = args.transcript

        def factory():
            return MockProvider.from_file(transcript_path)

        return factory, {"provider": "mock", "transcript": transcript_path}
    config = ProviderConfig(
        base_url=args.base_url,
        model=args.model,
        temperature=args.temperature,
        max_tokens=args.max_tokens,
        timeout=args.timeout,
        retries=args.provider_retries,
        api_key_env=args.api_key_env,
    )
    details = {"provider": "http", **config.__dict__}
    return (lambda: HttpProvider(config)), details


def _load_candidate(path: str) -> dsl.TypedProgram:
    try:
        return dsl.parse_typed(Path(path).read_text())
    except OSError as exc:
        raise RuntimeFailure(f"cannot read {path}: {exc}") from exc
    except dsl.DslError as exc:
        raise RuntimeFailure(f"{path}: {exc}") from exc


def _best_candidate_of_run(run_dir: Path) -> tuple[dsl.TypedProgram, dict]:
    candidates_dir = run_dir / "candidates"
    best_meta = None
    for meta_path in sorted(candidates_dir.glob("*.meta.json")):
        meta = json.loads(meta_path.read_text())
        if meta["fitness"] is None:
            continue
        if best_meta is None or meta["fitness"] < best_meta["fitness"]:
            best_meta = meta
    if best_meta is None:
        raise RuntimeFailure(f"{run_dir}: no valid candidate in archive")
    source = (candidates_dir / f"{best_meta['query_index']}.fn").read_text()
    return dsl.parse_typed(source), best_meta


# -------------------------------------------------------------- subcommands

def _cmd_bounds(args) -> int:
    suite_id, functions = targets.resolve_suite(args.suite, args.dim)
    manifest = _manifest_for_output(
        "bounds",
        {
            "suite": args.suite,
            "dim": args.dim,
            "seed": args.seed,
            "seeds_per_problem": args.seeds_per_problem,
            "n": args.n,
            "workers": args.workers,
        },
        [],
        args.out,
    )
    bounds = targets.compute_bounds(
        suite_id,
        functions,
        dim=args.dim,
        base_seed=args.seed,
        seeds_per_problem=args.seeds_per_problem,
        n=args.n,
        workers=args.workers,
    )
    bounds.save(args.out)
    manifest.finish()
    print(f"wrote bounds for {len(functions)} problems to {args.out}")
    return 0


def _target_spec_from_args(args) -> targets.TargetSpec:
    chosen = [
        name
        for name, value in (
            ("--spec", args.spec),
            ("--function", args.function),
            ("--hybrid", args.hybrid),
            ("--dsl-file", args.dsl_file),
            ("--feature-file", args.feature_file),
        )
        if value
    ]
    if len(chosen) != 1:
        raise UsageError(
            "choose exactly one of --spec, --function, --hybrid, --dsl-file, "
            "--feature-file"
        )
    if args.spec:
        return targets.TargetSpec.from_file(args.spec)
    seeds = tuple(range(args.seed_base, args.seed_base + args.seed_count))
    if args.function:
        return targets.TargetSpec(
            kind="builtin", name=args.function, dim=args.dim, seeds=seeds
        )
    if args.hybrid:
        parts = args.hybrid.split(",")
        if len(parts) not in (2, 3):
            raise UsageError("--hybrid expects idA,idB[,alpha]")
        alpha = float(parts[2]) if len(parts) == 3 else targets.DEFAULT_ALPHA
        return targets.TargetSpec(
            kind="hybrid",
            hybrid_a=parts[0],
            hybrid_b=parts[1],
            alpha=alpha,
            dim=args.dim,
            seeds=seeds,
        )
    if args.dsl_file:
        return targets.TargetSpec(
            kind="dsl-file", path=args.dsl_file, dim=args.dim, seeds=seeds
        )
    return targets.TargetSpec(kind="feature-file", path=args.feature_file, dim=args.dim)


def _cmd_target(args) -> int:
    bounds = _load_bounds(args.bounds)
    spec = _target_spec_from_args(args)
    if spec.dim != args.dim:
        raise RuntimeFailure(f"spec is for dim={spec.dim}, flags say dim={args.dim}")
    manifest = _manifest_for_output(
        "target",
        {
            "dim": args.dim,
            "source": spec.kind,
            "seeds": list(spec.seeds),
            "n": args.n,
        },
        [args.bounds, args.spec, args.dsl_file, args.feature_file],
        args.out,
    )
    try:
        vector = targets.compute_target_vector(
            spec, bounds, n=args.n, workers=args.workers
        )
    except (ValueError, dsl.DslError) as exc:
        raise RuntimeFailure(str(exc)) from exc
    targets.save_target_vector(vector, args.out, dim=args.dim)
    manifest.finish()
    print(f"wrote target vector to {args.out}")
    return 0


def _search_config_from_args(args) -> SearchConfig:
    file_config: dict = {}
    if args.config:
        try:
            file_config = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise RuntimeFailure(f"cannot load config {args.config}: {exc}") from exc

    def pick(flag, key, default):
        if flag is not None:
            return flag
        return file_config.get(key, default)

    search_seeds = args.search_seeds
    if search_seeds is None:
        seeds_cfg = file_config.get("search_seeds", [0])
        search_seeds = tuple(int(s) for s in seeds_cfg)
    try:
        return SearchConfig(
            method=pick(args.method, "method", "eotf"),
            dim=args.dim,
            budget=pick(args.budget, "budget", evolve.DEFAULT_BUDGET),
            population_size=pick(
                args.population, "population_size", evolve.DEFAULT_POPULATION
            ),
            exploration_parents=pick(
                args.parents, "exploration_parents", evolve.DEFAULT_EXPLORATION_PARENTS
            ),
            search_seeds=search_seeds,
            sample_n=pick(args.n, "sample_n", None),
            rng_seed=args.seed,
            repair_retries=pick(args.repair_retries, "repair_retries", 2),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _cmd_evolve(args) -> int:
    bounds = _load_bounds(args.bounds)
    config = _search_config_from_args(args)
    if bounds.dim != config.dim:
        raise RuntimeFailure(
            f"bounds are for dim={bounds.dim}, run wants dim={config.dim}"
        )
    target = _load_target(args.target, bounds, config.dim)
    factory, provider_details = _make_provider_factory(args)

    run_dir = Path(args.out)
    manifest = Manifest(
        "evolve",
        {**config.to_dict(), **provider_details},
        [Path(p) for p in (args.target, args.bounds, args.transcript) if p],
        run_dir / "manifest.json",
    )
    try:
        archive = evolve.run_search(config, factory(), run_dir, target, bounds)
    except Exception as exc:
        raise RuntimeFailure(f"search failed: {exc}") from exc
    manifest.finish()
    best = archive.best
    if best is None:
        print("run complete; no valid candidate found")
    else:
        print(
            f"run complete; best fitness {best.fitness:.6f} "
            f"at query {best.query_index} ({best.operator.value})"
        )
    return 0


def _cmd_resample(args) -> int:
    bounds = _load_bounds(args.bounds)
    forbidden: tuple[int, ...] = tuple(args.search_seeds or ())

    if args.run:
        run_dir = Path(args.run)
        typed, meta = _best_candidate_of_run(run_dir)
        run_config = json.loads((run_dir / "config.json").read_text())
        dim = run_config["dim"]
        forbidden = forbidden or tuple(run_config["search_seeds"])
        target = _load_target(str(run_dir / "target.json"), bounds, dim)
        candidate_label = f"{args.run}#q{meta['query_index']}"
        inputs = [args.bounds, str(run_dir / "target.json")]
    else:
        if not (args.candidate and args.target and args.dim):
            raise UsageError("need --run, or --candidate with --target and --dim")
        typed = _load_candidate(args.candidate)
        dim = args.dim
        target = _load_target(args.target, bounds, dim)
        candidate_label = args.candidate
        inputs = [args.bounds, args.target, args.candidate]

    manifest = _manifest_for_output(
        "resample",
        {
            "candidate": candidate_label,
            "dim": dim,
            "seed_base": args.seed_base,
            "count": args.count,
            "n": args.n,
            "forbidden_seeds": list(forbidden),
        },
        inputs,
        args.out,
    )
    try:
        stats = evalbench.resample_median(
            typed,
            target,
            bounds,
            dim=dim,
            base_seed=args.seed_base,
            count=args.count,
            n=args.n,
            forbidden_seeds=forbidden,
            workers=args.workers,
        )
    except ValueError as exc:
        raise RuntimeFailure(str(exc)) from exc
    evalbench.write_resample_csv(stats, args.out)
    manifest.finish()
    flag = "" if stats.robust else " (flagged: mostly invalid draws)"
    print(
        f"median {stats.median!r} q25 {stats.q25!r} q75 {stats.q75!r} "
        f"invalid {stats.invalid_count}/{args.count}{flag}"
    )
    return 0


def _cmd_winmatrix(args) -> int:
    try:
        payload = json.loads(Path(args.input).read_text())
        matrix = evalbench.win_matrix(payload)
    except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
        raise RuntimeFailure(f"cannot build win matrix: {exc}") from exc
    manifest = _manifest_for_output(
        "winmatrix", {"input": args.input}, [args.input], args.out
    )
    evalbench.write_win_matrix_csv(matrix, args.out)
    manifest.finish()
    for i, a in enumerate(matrix.methods):
        for j, b in enumerate(matrix.methods):
            if i != j:
                print(f"{a} beats {b}: {matrix.percentage(a, b):.1f}%")
    return 0


def _cmd_rank(args) -> int:
    suite_id, functions = targets.resolve_suite(args.suite, args.dim)
    problems = {fn.id: fn for fn in functions}
    optimizers = tuple(args.optimizers.split(",")) if args.optimizers else evalbench.OPTIMIZER_KINDS
    manifest = _manifest_for_output(
        "rank",
        {
            "suite": suite_id,
            "dim": args.dim,
            "budget_multiplier": args.budget_multiplier,
            "repetitions": args.repetitions,
            "seed": args.seed,
            "optimizers": list(optimizers),
        },
        [],
        args.out,
    )
    try:
        table = evalbench.rank_portfolio(
            problems,
            dim=args.dim,
            budget_multiplier=args.budget_multiplier,
            repetitions=args.repetitions,
            seed=args.seed,
            optimizers=optimizers,
            workers=args.workers,
        )
    except ValueError as exc:
        raise RuntimeFailure(str(exc)) from exc
    evalbench.write_rank_csv(table, args.out)
    manifest.finish()
    pairs = ", ".join(
        f"{name}={rank:.2f}" for name, rank in zip(table.optimizers, table.mean_ranks)
    )
    print(f"mean ranks: {pairs}; friedman chi2 = {table.friedman_chi2:.4f}")
    return 0


def _cmd_grid(args) -> int:
    typed = _load_candidate(args.candidate)
    manifest = _manifest_for_output(
        "grid",
        {"candidate": args.candidate, "resolution": args.resolution},
        [args.candidate],
        args.out,
    )
    try:
        grid = evalbench.grid_render(typed, args.resolution)
    except (ValueError, dsl.EvalError) as exc:
        raise RuntimeFailure(str(exc)) from exc
    evalbench.write_grid_csv(grid, args.out)
    manifest.finish()
    print(f"wrote {args.resolution}x{args.resolution} grid to {args.out}")
    return 0


def _cmd_export(args) -> int:
    typed = _load_candidate(args.candidate)
    text = dsl.render(typed.program, args.dialect)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.dialect} rendering to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_validate(args) -> int:
    source = Path(args.candidate).read_text()
    try:
        typed = dsl.parse_typed(source)
    except dsl.DslError as exc:
        raise RuntimeFailure(f"{args.candidate}: {exc}") from exc
    hint = typed.dim_hint if typed.dim_hint is not None else "any"
    print(f"{args.candidate}: ok ({len(typed.program.body)} assignments, dim {hint})")
    return 0


# ------------------------------------------------------------- scale study

def scale_study(
    dims: tuple[int, ...],
    suite_spec: str,
    bounds_dir: str | Path,
    provider_factory,
    run_root: str | Path,
    method: str = "eotf",
    budget: int = evolve.DEFAULT_BUDGET,
    population_size: int = evolve.DEFAULT_POPULATION,
    exploration_parents: int = evolve.DEFAULT_EXPLORATION_PARENTS,
    rng_seed: int = 0,
    target_seed_base: int = 0,
    target_seed_count: int = 100,
    resample_base: int = 100_000,
    resample_count: int = evalbench.DEFAULT_RESAMPLE_COUNT,
    workers: int = 1,
) -> list[tuple[int, float]]:
    """Evolve + resample every suite problem at each dimension.

    Returns (dim, average of per-problem resampled median distances) rows,
    sampling at the default rate of 250 * D points throughout.
    """
    bounds_dir = Path(bounds_dir)
    run_root = Path(run_root)
    rows: list[tuple[int, float]] = []

    for dim in dims:
        bounds_path = bounds_dir / f"bounds_d{dim}.json"
        if not bounds_path.is_file():
            raise RuntimeFailure(f"missing per-dim input: {bounds_path}")
        bounds = Bounds.load(bounds_path)
        if bounds.dim != dim:
            raise RuntimeFailure(f"{bounds_path} is for dim={bounds.dim}")
        _, functions = targets.resolve_suite(suite_spec, dim)

        medians: list[float] = []
        for index, function in enumerate(functions):
            target = _function_target(
                function, bounds, dim, target_seed_base, target_seed_count, workers
            )
            config = SearchConfig(
                method=method,
                dim=dim,
                budget=budget,
                population_size=population_size,
                exploration_parents=exploration_parents,
                search_seeds=(target_seed_base,),
                rng_seed=rng_seed,
            )
            run_dir = run_root / f"d{dim}" / f"{index:02d}_{_slug(function.id)}"
            archive = evolve.run_search(
                config, provider_factory(), run_dir, target, bounds
            )
            if archive.best is None:
                medians.append(float("nan"))
                continue
            stats = evalbench.resample_median(
                archive.best.typed,
                target,
                bounds,
                dim=dim,
                base_seed=resample_base,
                count=resample_count,
                forbidden_seeds=config.search_seeds,
                workers=workers,
            )
            medians.append(stats.median)

        defined = [m for m in medians if not math.isnan(m)]
        average = float(np.mean(defined)) if defined else float("nan")
        rows.append((dim, average))
    return rows


def _function_target(function, bounds, dim, seed_base, seed_count, workers):
    seeds = list(range(seed_base, seed_base + seed_count))
    vectors = targets._ordered_map(
        lambda seed: compute_features_raw(function, SampleDesign(dim=dim, seed=seed)),
        seeds,
        workers,
    )
    valid = [v for v in vectors if v.fully_defined]
    if not valid:
        raise RuntimeFailure(f"{function.id}: no valid target samples")
    mean_raw = ElaVector.from_array(np.mean([v.values for v in valid], axis=0))
    return normalize(mean_raw, bounds)


def _slug(text: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in text)


def _cmd_scale_study(args) -> int:
    dims = _parse_int_list(args.dims)
    if not dims:
        raise UsageError("--dims must name at least one dimension")
    factory, provider_details = _make_provider_factory(args)
    run_root = Path(args.run_root)
    manifest = Manifest(
        "scale-study",
        {
            "dims": list(dims),
            "suite": args.suite,
            "method": args.method or "eotf",
            "budget": args.budget,
            "population": args.population,
            "seed": args.seed,
            "target_seed_base": args.seed_base,
            "target_seed_count": args.seed_count,
            "resample_base": args.resample_base,
            "resample_count": args.resample_count,
            **provider_details,
        },
        [Path(p) for p in (args.transcript,) if p],
        run_root / "manifest.json",
    )
    rows = scale_study(
        dims,
        args.suite,
        args.bounds_dir,
        factory,
        run_root,
        method=args.method or "eotf",
        budget=args.budget,
        population_size=args.population,
        exploration_parents=args.parents,
        rng_seed=args.seed,
        target_seed_base=args.seed_base,
        target_seed_count=args.seed_count,
        resample_base=args.resample_base,
        resample_count=args.resample_count,
        workers=args.workers,
    )
    lines = ["dim,avg_median_distance"]
    for dim, value in rows:
        lines.append(f"{dim},{value!r}")
    Path(args.out).write_text("\n".join(lines) + "\n")
    manifest.finish()
    for dim, value in rows:
        print(f"dim {dim}: average median distance {value!r}")
    return 0


# ------------------------------------------------------------------ parser

def build_parser() -> _Parser:
    parser = _Parser(prog="elaforge", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_workers(p):
        p.add_argument(
            "--workers", type=int, default=os.cpu_count() or 1,
            help="worker threads for feature computation (default: logical cores)",
        )

    p = sub.add_parser("bounds", help="compute suite-wide normalization bounds")
    p.add_argument("--suite", required=True, help="classic | classic:a,b | ring[:alpha] | dir of .fn files")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds-per-problem", type=int, default=10)
    p.add_argument("--n", type=int, default=None, help="points per sample (default 250*dim)")
    p.add_argument("--out", required=True)
    add_workers(p)
    p.set_defaults(handler=_cmd_bounds)

    p = sub.add_parser("target", help="compute a normalized target vector")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--bounds", required=True)
    p.add_argument("--spec", help="TargetSpec JSON/TOML file")
    p.add_argument("--function", help="builtin function name")
    p.add_argument("--hybrid", help="idA,idB[,alpha]")
    p.add_argument("--dsl-file", help="candidate .fn file as target")
    p.add_argument("--feature-file", help="precomputed feature file")
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--seed-count", type=int, default=targets.DEFAULT_TARGET_SEED_COUNT)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--out", required=True)
    add_workers(p)
    p.set_defaults(handler=_cmd_target)

    p = sub.add_parser("evolve", help="run a search under a fixed query budget")
    p.add_argument("--method", choices=evolve.METHODS)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--population", type=int)
    p.add_argument("--parents", type=int)
    p.add_argument("--search-seeds", type=_parse_int_list)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--repair-retries", type=int)
    p.add_argument("--seed", type=int, default=0, help="rng seed for parent selection")
    p.add_argument("--target", required=True)
    p.add_argument("--bounds", required=True)
    p.add_argument("--config", help="JSON file with defaults (flags win)")
    p.add_argument("--provider", choices=("mock", "http"), default="mock")
    p.add_argument("--transcript", help="scripted responses for --provider mock")
    p.add_argument("--base-url", default="https://api.openai.com/v1")
    p.add_argument("--model", default="gpt-4o-mini")
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--max-tokens", type=int, default=2048)
    p.add_argument("--timeout", type=float, default=120.0)
    p.add_argument("--provider-retries", type=int, default=2)
    p.add_argument("--api-key-env", default="ELAFORGE_API_KEY")
    p.add_argument("--out", required=True, help="run directory")
    p.set_defaults(handler=_cmd_evolve)

    p = sub.add_parser("resample", help="re-measure a candidate over fresh samples")
    p.add_argument("--run", help="run directory; uses its best candidate")
    p.add_argument("--candidate", help=".fn file (requires --target and --dim)")
    p.add_argument("--target")
    p.add_argument("--dim", type=int)
    p.add_argument("--bounds", required=True)
    p.add_argument("--seed-base", type=int, default=100_000)
    p.add_argument("--count", type=int, default=evalbench.DEFAULT_RESAMPLE_COUNT)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--search-seeds", type=_parse_int_list, help="seeds to keep disjoint")
    p.add_argument("--out", required=True)
    add_workers(p)
    p.set_defaults(handler=_cmd_resample)

    p = sub.add_parser("winmatrix", help="pairwise win percentages from medians")
    p.add_argument("--input", required=True, help="JSON {method: {problem: median}}")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_winmatrix)

    p = sub.add_parser("rank", help="fixed-budget optimizer ranking over a suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--budget-multiplier", type=int, default=evalbench.DEFAULT_BUDGET_MULTIPLIER)
    p.add_argument("--repetitions", type=int, default=evalbench.DEFAULT_REPETITIONS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--optimizers", help=f"comma list from {evalbench.OPTIMIZER_KINDS}")
    p.add_argument("--out", required=True)
    add_workers(p)
    p.set_defaults(handler=_cmd_rank)

    p = sub.add_parser("grid", help="export a 2-D landscape grid as CSV")
    p.add_argument("--candidate", required=True)
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_grid)

    p = sub.add_parser("export", help="render a candidate file to a dialect")
    p.add_argument("--candidate", required=True)
    p.add_argument("--dialect", choices=dsl.DIALECTS, default="numpy-text")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_export)

    p = sub.add_parser("validate", help="parse and typecheck a candidate file")
    p.add_argument("candidate")
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("scale-study", help="evolve + resample across dimensions")
    p.add_argument("--dims", required=True, help="comma list, e.g. 2,3,4,5")
    p.add_argument("--suite", required=True)
    p.add_argument("--bounds-dir", required=True, help="holds bounds_d<dim>.json files")
    p.add_argument("--method", choices=evolve.METHODS)
    p.add_argument("--budget", type=int, default=evolve.DEFAULT_BUDGET)
    p.add_argument("--population", type=int, default=evolve.DEFAULT_POPULATION)
    p.add_argument("--parents", type=int, default=evolve.DEFAULT_EXPLORATION_PARENTS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seed-base", type=int, default=0, help="target sampling base seed")
    p.add_argument("--seed-count", type=int, default=3, help="target samples per problem")
    p.add_argument("--resample-base", type=int, default=100_000)
    p.add_argument("--resample-count", type=int, default=evalbench.DEFAULT_RESAMPLE_COUNT)
    p.add_argument("--provider", choices=("mock", "http"), default="mock")
    p.add_argument("--transcript")
    p.add_argument("--base-url", default="https://api.openai.com/v1")
    p.add_argument("--model", default="gpt-4o-mini")
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--max-tokens", type=int, default=2048)
    p.add_argument("--timeout", type=float, default=120.0)
    p.add_argument("--provider-retries", type=int, default=2)
    p.add_argument("--api-key-env", default="ELAFORGE_API_KEY")
    p.add_argument("--run-root", required=True)
    p.add_argument("--out", required=True)
    add_workers(p)
    p.set_defaults(handler=_cmd_scale_study)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeFailure, OSError, ValueError, ProviderError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
