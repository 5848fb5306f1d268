"""Command-line harness: single solves, parameter sweeps, self-verification.

Exit codes: 0 = success, 1 = configuration/usage error, 2 = internal
error (including a failed verification).
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import baselines, flow, mmec, oracle, scengen
from .model import (
    Scenario,
    Schedule,
    evaluate_cost,
    scenario_to_text,
    schedule_to_text,
)
from .scengen import GenConfig

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INTERNAL = 2

ALGORITHMS = ("mmec", "rors", "roos", "sao")

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def trial_seed(master_seed: int, parameter: str, value: str, trial: int) -> int:
    """64-bit mix of (master seed, swept parameter, value, trial index);
    adding trials or sweep points never changes earlier seeds."""
    h = master_seed & _MASK64
    for token in (parameter, value, str(trial)):
        for byte in token.encode("utf-8"):
            h = _splitmix64(h ^ byte)
    return h


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _fmt_cost(value: Fraction) -> str:
    return str(int(value)) if value.denominator == 1 else str(value)


# --- configuration assembly ---------------------------------------------------

_GEN_FLAGS = (
    ("users", int), ("videos", int), ("peers", int), ("slots", int),
    ("storage", int), ("capacity", int), ("alpha", float),
    ("peer_cost", Fraction), ("cdn_cost", Fraction), ("placement", str),
    ("storage_alloc", str), ("capacity_alloc", str), ("seed", int),
)


def _add_gen_flags(parser: argparse.ArgumentParser, include_seed: bool = True) -> None:
    parser.add_argument("--config", type=Path, help="key = value config file")
    parser.add_argument("--users", type=int)
    parser.add_argument("--videos", type=int)
    parser.add_argument("--peers", type=int)
    parser.add_argument("--slots", type=int)
    parser.add_argument("--storage", type=int)
    parser.add_argument("--capacity", type=int)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--peer-cost", dest="peer_cost", type=Fraction)
    parser.add_argument("--cdn-cost", dest="cdn_cost", type=Fraction)
    parser.add_argument("--placement", choices=scengen.PLACEMENTS)
    parser.add_argument("--storage-alloc", dest="storage_alloc",
                        choices=scengen.ALLOCATIONS)
    parser.add_argument("--capacity-alloc", dest="capacity_alloc",
                        choices=scengen.ALLOCATIONS)
    if include_seed:
        parser.add_argument("--seed", type=int)


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--pathfinder", choices=("bellman-ford", "dijkstra"),
                        default="bellman-ford",
                        help="augmenting-path search (default: bellman-ford)")
    parser.add_argument("--aggregate", action="store_true",
                        help="merge virtual replicas in the flow phase "
                             "(same optimum, smaller network)")


def _add_sao_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--t-init", dest="t_init", type=float, default=1000.0)
    parser.add_argument("--gamma", type=float, default=0.95)
    parser.add_argument("--iters", type=int, default=1000)
    parser.add_argument("--inner", type=int, default=20)
    parser.add_argument("--repair", choices=("random", "cheapest"),
                        default="cheapest",
                        help="node re-pick policy for displaced requests")


def _build_config(args) -> GenConfig:
    config = GenConfig()
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        try:
            config = scengen.config_from_text(text, base=config)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc
    overrides = {}
    for name, _ in _GEN_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if overrides:
        try:
            config = replace(config, **overrides)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc
    if config.slots < 1:
        raise ConfigError("slots must be >= 1")
    return config


@dataclass
class RunOutcome:
    total: Fraction
    peer: Fraction
    cdn: Fraction
    runtime_ms: float
    augmentations: Optional[int]
    schedule: Schedule


def _run_algorithm(
    algorithm: str,
    scenario: Scenario,
    seed: int,
    pathfinder: str = "bellman-ford",
    aggregate: bool = False,
    sao_params: Optional[baselines.SaoParams] = None,
) -> RunOutcome:
    start = time.perf_counter()
    augmentations = None
    if algorithm == "mmec":
        result = mmec.run_detailed(scenario, method=pathfinder, aggregate=aggregate)
        schedule, cost = result.schedule, result.cost
        augmentations = result.diagnostics.augmentations
    elif algorithm == "rors":
        schedule = baselines.rors(scenario, seed)
        cost = None
    elif algorithm == "roos":
        schedule = baselines.roos(scenario, seed)
        cost = None
    elif algorithm == "sao":
        schedule = baselines.sao(scenario, seed, sao_params)
        cost = None
    else:
        raise ConfigError(f"unknown algorithm {algorithm!r}")
    elapsed_ms = (time.perf_counter() - start) * 1e3
    if cost is None:
        cost = evaluate_cost(scenario, schedule)
    return RunOutcome(
        total=cost.total,
        peer=cost.peer_total,
        cdn=cost.cdn_total,
        runtime_ms=elapsed_ms,
        augmentations=augmentations,
        schedule=schedule,
    )


# --- solve --------------------------------------------------------------------

def _cmd_solve(args) -> int:
    config = _build_config(args)
    scenario = scengen.generate(config)
    seed = config.seed
    sao_params = baselines.SaoParams(
        t_init=args.t_init, gamma=args.gamma,
        max_iters=args.iters, inner_moves=args.inner, repair=args.repair,
    )
    outcome = _run_algorithm(
        args.algo, scenario, seed,
        pathfinder=args.pathfinder, aggregate=args.aggregate,
        sao_params=sao_params,
    )
    aug = "" if outcome.augmentations is None else outcome.augmentations
    print(
        f"algo={args.algo} total={_fmt_cost(outcome.total)} "
        f"peer={_fmt_cost(outcome.peer)} cdn={_fmt_cost(outcome.cdn)} "
        f"runtime_ms={outcome.runtime_ms:.3f} augmentations={aug}"
    )
    if args.dump_schedule is not None:
        args.dump_schedule.write_text(schedule_to_text(outcome.schedule),
                                      encoding="utf-8")
    if args.dump_scenario is not None:
        args.dump_scenario.write_text(scenario_to_text(scenario), encoding="utf-8")
    if args.dump_network is not None:
        network = flow.build_network(scenario, aggregate=args.aggregate)
        args.dump_network.write_text(flow.dump_network(network), encoding="utf-8")
    return EXIT_OK


# --- sweep --------------------------------------------------------------------

PRESETS = (
    "users", "peers", "videos", "slots", "storage", "capacity", "alpha",
    "hetero-storage", "hetero-capacity", "placement",
)


def preset_points(preset: str, base: GenConfig) -> tuple[str, list[tuple[str, GenConfig]]]:
    """(parameter name, [(value label, config), ...]) for a preset.

    Only the swept parameter departs from the base configuration; the
    peers preset additionally pins the total storage/capacity of the base
    so fragmentation, not resources, is what varies.
    """
    if preset == "users":
        return "users", [(str(u), replace(base, users=u))
                         for u in range(50, 141, 10)]
    if preset == "peers":
        storage_total = base.storage * base.peers
        capacity_total = base.capacity * base.peers
        return "peers", [
            (str(p), replace(base, peers=p, storage_total=storage_total,
                             capacity_total=capacity_total))
            for p in range(10, 101, 10)
        ]
    if preset == "videos":
        return "videos", [(str(v), replace(base, videos=v))
                          for v in range(100, 501, 50)]
    if preset == "slots":
        return "slots", [(str(t), replace(base, slots=t))
                         for t in range(6, 21, 2)]
    if preset == "storage":
        return "storage", [(str(s), replace(base, storage=s))
                           for s in range(2, 11)]
    if preset == "capacity":
        return "capacity", [(str(d), replace(base, capacity=d))
                            for d in range(1, 6)]
    if preset == "alpha":
        return "alpha", [(f"{k / 10:.1f}", replace(base, alpha=k / 10))
                         for k in range(1, 11)]
    if preset == "hetero-storage":
        return "storage_alloc", [
            ("uniform", replace(base, storage_alloc="uniform")),
            ("random", replace(base, storage_alloc="random")),
        ]
    if preset == "hetero-capacity":
        return "capacity_alloc", [
            ("uniform", replace(base, capacity_alloc="uniform")),
            ("random", replace(base, capacity_alloc="random")),
        ]
    if preset == "placement":
        return "placement", [
            (mode, replace(base, placement=mode)) for mode in scengen.PLACEMENTS
        ]
    raise ConfigError(f"unknown preset {preset!r}")


CSV_HEADER = (
    "parameter", "value", "trial_seed", "algorithm",
    "total_cost", "peer_cost", "cdn_cost", "runtime_ms", "augmentations",
)


@dataclass(frozen=True)
class SweepSpec:
    """One sweep invocation: which preset, how many trials per point,
    which algorithms, over which base configuration."""

    preset: str
    base: GenConfig
    trials: int = 20
    master_seed: int = 0
    algos: tuple[str, ...] = ALGORITHMS
    pathfinder: str = "bellman-ford"
    aggregate: bool = False
    jobs: int = 1

    def rows(self) -> list[list[str]]:
        return sweep_rows(
            self.preset, self.base, self.trials, self.master_seed,
            self.algos, pathfinder=self.pathfinder,
            aggregate=self.aggregate, jobs=self.jobs,
        )


def _sweep_task(task) -> list[list[str]]:
    parameter, value, config, seed, algos, pathfinder, aggregate = task
    config = replace(config, seed=seed)
    scenario = scengen.generate(config)
    rows = []
    for algorithm in algos:
        outcome = _run_algorithm(
            algorithm, scenario, seed,
            pathfinder=pathfinder, aggregate=aggregate,
        )
        rows.append([
            parameter, value, str(seed), algorithm,
            _fmt_cost(outcome.total), _fmt_cost(outcome.peer),
            _fmt_cost(outcome.cdn), f"{outcome.runtime_ms:.3f}",
            "" if outcome.augmentations is None else str(outcome.augmentations),
        ])
    return rows


def sweep_rows(
    preset: str,
    base: GenConfig,
    trials: int,
    master_seed: int,
    algos: Sequence[str],
    pathfinder: str = "bellman-ford",
    aggregate: bool = False,
    jobs: int = 1,
) -> list[list[str]]:
    parameter, points = preset_points(preset, base)
    tasks = []
    for value, config in points:
        for trial in range(trials):
            seed = trial_seed(master_seed, parameter, value, trial)
            tasks.append((parameter, value, config, seed, tuple(algos),
                          pathfinder, aggregate))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_task, tasks))
    else:
        results = [_sweep_task(task) for task in tasks]
    rows = []
    for result in results:  # ordered: preset points, then trials, then algos
        rows.extend(result)
    return rows


def _cmd_sweep(args) -> int:
    base = _build_config(args)
    algos = tuple(name.strip() for name in args.algos.split(",") if name.strip())
    for name in algos:
        if name not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {name!r}")
    if not algos:
        raise ConfigError("no algorithms selected")
    if args.trials < 1:
        raise ConfigError("trials must be >= 1")
    spec = SweepSpec(
        preset=args.preset, base=base, trials=args.trials,
        master_seed=args.sweep_seed, algos=algos,
        pathfinder=args.pathfinder, aggregate=args.aggregate, jobs=args.jobs,
    )
    rows = spec.rows()
    try:
        with args.out.open("w", newline="", encoding="utf-8") as fp:
            writer = csv.writer(fp)
            writer.writerow(CSV_HEADER)
            writer.writerows(rows)
    except OSError as exc:
        raise ConfigError(f"cannot write {args.out}: {exc}") from exc
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


# --- verify -------------------------------------------------------------------

def run_verify(
    instances: int,
    seed: int,
    solve_cost: Optional[Callable[[Scenario], Fraction]] = None,
    report: Optional[Callable[[str], None]] = None,
) -> tuple[int, int]:
    """Compare the solver against the exhaustive oracle on random tiny
    instances; returns (matches, instances).  `solve_cost` is injectable
    so a corrupted build can be simulated in tests."""
    import numpy as np

    if solve_cost is None:
        def solve_cost(scenario: Scenario) -> Fraction:
            _, cost = mmec.run(scenario)
            return cost.total

    rng = np.random.default_rng(seed)
    matches = 0
    for index in range(instances):
        scenario = oracle.random_tiny_scenario(rng)
        expected, _ = oracle.exhaustive_optimal(scenario)
        actual = solve_cost(scenario)
        if actual == expected:
            matches += 1
        elif report is not None:
            report(f"instance {index}: solver {actual} != oracle {expected}")
    return matches, instances


def _cmd_verify(args) -> int:
    if args.instances < 0:
        raise ConfigError("instances must be >= 0")
    matches, total = run_verify(args.instances, args.seed or 0,
                                report=lambda msg: print(msg, file=sys.stderr))
    print(f"verified {matches}/{total} instances optimal")
    return EXIT_OK if matches == total else EXIT_INTERNAL


# --- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pcdnsched",
                     description="Playback ordering and delivery scheduling "
                                 "for peer-assisted CDNs")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one generated scenario",
                           parents=[], add_help=True)
    _add_gen_flags(solve)
    solve.add_argument("--algo", choices=ALGORITHMS, default="mmec")
    _add_solver_flags(solve)
    _add_sao_flags(solve)
    solve.add_argument("--dump-schedule", type=Path)
    solve.add_argument("--dump-scenario", type=Path)
    solve.add_argument("--dump-network", type=Path)
    solve.set_defaults(func=_cmd_solve)

    sweep = sub.add_parser("sweep", help="run a parameter sweep to CSV")
    _add_gen_flags(sweep, include_seed=False)
    sweep.add_argument("--preset", choices=PRESETS, required=True)
    sweep.add_argument("--trials", type=int, default=20)
    sweep.add_argument("--seed", dest="sweep_seed", type=int, default=0,
                       help="master seed; trial seeds are mixed from it")
    sweep.add_argument("--algos", default=",".join(ALGORITHMS))
    sweep.add_argument("--out", type=Path, required=True)
    _add_solver_flags(sweep)
    sweep.add_argument("--jobs", type=int, default=1)
    sweep.set_defaults(func=_cmd_sweep)

    verify = sub.add_parser("verify",
                            help="check the solver against the exhaustive "
                                 "oracle on random tiny instances")
    verify.add_argument("--instances", type=int, default=100)
    verify.add_argument("--seed", type=int, default=0)
    verify.set_defaults(func=_cmd_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # solver defects, I/O, ...
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
