"""Experiment orchestration: single runs, per-seed bisection for the
minimally required population size, wall-time minimization over population
sizes, and multi-seed experiment matrices with rank statistics.

Every run is fully determined by its configuration and seed; matrix cells
are independent and may execute in parallel OS processes.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .catalog import ConfigError, build_problem, make_algorithm, parse_ratio
from .engine import RunStats, Simulation, SimulationConfig
from .search import (
    BisectionResult,
    GoldenResult,
    ProbeResult,
    bisect_min_popsize as _bisect,
    golden_section_min as _golden,
)
from .stats import holm_bonferroni, mann_whitney_u, quantiles

__all__ = [
    "ExperimentConfig",
    "run_single",
    "bisect_min_popsize",
    "golden_min_time",
    "MatrixResult",
    "run_experiment_matrix",
    "rows_to_csv",
]

CSV_HEADER = "algorithm,problem,ratio,seed,pop_size,success,simulated_time,evaluations"


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one experiment cell."""

    algorithm: str
    problem: str
    ratio: str = "1:1"
    processors: int | None = None  # None: one per population slot
    base_pop: int = 8
    max_pop: int = 4096
    max_sim_time: float | None = None
    max_evaluations: int | None = 2_000_000
    stagnation: bool = False
    charge_noop_evals: bool = False

    def build_problem(self):
        return build_problem(self.problem, parse_ratio(self.ratio))


def _simulate(
    cfg: ExperimentConfig,
    problem,
    seed: int,
    pop_size: int,
    record_events: bool = False,
    observer=None,
) -> RunStats:
    sim_cfg = SimulationConfig(
        pop_size=pop_size,
        seed=seed,
        n_workers=cfg.processors,
        max_sim_time=cfg.max_sim_time,
        max_evaluations=cfg.max_evaluations,
        stagnation=cfg.stagnation,
        charge_noop_evals=cfg.charge_noop_evals,
        record_events=record_events,
    )
    algorithm = make_algorithm(cfg.algorithm, problem)
    return Simulation(problem, algorithm, sim_cfg, observer).run()


def run_single(
    cfg: ExperimentConfig,
    seed: int,
    pop_size: int,
    record_events: bool = False,
    observer=None,
) -> RunStats:
    """One simulation at an explicit population size."""
    if pop_size % 2 or pop_size < 4:
        raise ConfigError("population size must be even and >= 4")
    problem = cfg.build_problem()
    return _simulate(cfg, problem, seed, pop_size, record_events, observer)


def bisect_min_popsize(cfg: ExperimentConfig, seed: int) -> BisectionResult:
    """Smallest population size reaching the target for this seed."""
    problem = cfg.build_problem()
    run = _make_probe(cfg, problem, seed)
    return _bisect(run, seed, base_pop=cfg.base_pop, max_pop=cfg.max_pop)


def golden_min_time(cfg: ExperimentConfig, seed: int) -> GoldenResult:
    """Population size minimizing simulated wall time for this seed."""
    problem = cfg.build_problem()
    run = _make_probe(cfg, problem, seed)

    def measure(pop_size: int) -> float:
        probe = run(pop_size)
        return probe.simulated_time if probe.success else math.inf

    return _golden(measure, seed, base_pop=cfg.base_pop, max_pop=cfg.max_pop)


def _make_probe(cfg: ExperimentConfig, problem, seed: int):
    def run(pop_size: int) -> ProbeResult:
        stats = _simulate(cfg, problem, _run_seed(seed, pop_size), pop_size)
        return ProbeResult(
            pop_size=pop_size,
            success=stats.success,
            simulated_time=stats.simulated_time,
            evaluations=stats.evaluations_completed,
            reason=stats.reason,
        )

    return run


def _run_seed(seed: int, pop_size: int) -> int:
    # Distinct deterministic seed per (experiment seed, probed size); the
    # simulation derives all task streams from it.
    return (seed << 20) + pop_size


@dataclass
class MatrixRow:
    algorithm: str
    problem: str
    ratio: str
    seed: int
    pop_size: int | None  # None: FAILED
    success: bool
    simulated_time: float | None
    evaluations: int | None

    def csv(self) -> str:
        pop = "FAILED" if self.pop_size is None else str(self.pop_size)
        time = "" if self.simulated_time is None else repr(self.simulated_time)
        evals = "" if self.evaluations is None else str(self.evaluations)
        return (
            f"{self.algorithm},{self.problem},{self.ratio},{self.seed},"
            f"{pop},{int(self.success)},{time},{evals}"
        )


@dataclass
class MatrixResult:
    rows: list[MatrixRow]
    aggregates: dict
    tests: dict

    def to_json(self) -> str:
        return json.dumps(
            {"aggregates": self.aggregates, "tests": self.tests},
            indent=2,
            sort_keys=True,
        )


def _matrix_cell(args) -> MatrixRow:
    cfg, seed = args
    result = bisect_min_popsize(cfg, seed)
    probe = result.minimal_probe()
    return MatrixRow(
        algorithm=cfg.algorithm,
        problem=cfg.problem,
        ratio=cfg.ratio,
        seed=seed,
        pop_size=result.minimal_pop,
        success=not result.failed,
        simulated_time=probe.simulated_time if probe else None,
        evaluations=probe.evaluations if probe else None,
    )


def run_experiment_matrix(
    base: ExperimentConfig,
    algorithms: list[str],
    ratios: list[str],
    seeds: list[int],
    jobs: int = 1,
    alpha: float = 0.05,
) -> MatrixResult:
    """Bisect every (algorithm, ratio, seed) cell for the base problem.

    Emits one row per cell plus per-(algorithm, ratio) quantile aggregates
    under both failure conventions (failures excluded, and failures counted
    at the largest probed size) and pairwise rank tests across ratios with
    step-down correction. A failed cell never aborts the matrix.
    """
    cells = [
        (replace(base, algorithm=algo, ratio=ratio), seed)
        for algo in algorithms
        for ratio in ratios
        for seed in seeds
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_matrix_cell, cells))
    else:
        rows = [_matrix_cell(c) for c in cells]
    rows.sort(key=lambda r: (r.algorithm, r.problem, r.ratio, r.seed))

    aggregates: dict = {}
    by_group: dict[tuple[str, str], list[MatrixRow]] = {}
    for row in rows:
        by_group.setdefault((row.algorithm, row.ratio), []).append(row)
    for (algo, ratio), group in sorted(by_group.items()):
        succ = [float(r.pop_size) for r in group if r.pop_size is not None]
        capped = [
            float(r.pop_size) if r.pop_size is not None else float(base.max_pop)
            for r in group
        ]
        entry = {
            "seeds": len(group),
            "failures": sum(1 for r in group if r.pop_size is None),
            "pop_quantiles_failed_as_max": quantiles(capped),
        }
        entry["pop_quantiles_success_only"] = quantiles(succ) if succ else None
        aggregates[f"{algo}|{ratio}"] = entry

    tests: dict = {}
    for algo in algorithms:
        pairs = []
        for i in range(len(ratios)):
            for j in range(i + 1, len(ratios)):
                a = [
                    float(r.pop_size) if r.pop_size is not None else float(base.max_pop)
                    for r in by_group.get((algo, ratios[i]), [])
                ]
                b = [
                    float(r.pop_size) if r.pop_size is not None else float(base.max_pop)
                    for r in by_group.get((algo, ratios[j]), [])
                ]
                if a and b:
                    u, p = mann_whitney_u(a, b)
                    pairs.append((f"{ratios[i]} vs {ratios[j]}", u, p))
        if pairs:
            decisions = holm_bonferroni([p for _, _, p in pairs], alpha)
            tests[algo] = [
                {"pair": name, "U": u, "p": p, "reject": reject}
                for (name, u, p), reject in zip(pairs, decisions)
            ]
    return MatrixResult(rows=rows, aggregates=aggregates, tests=tests)


def rows_to_csv(rows: list[MatrixRow]) -> str:
    return "\n".join([CSV_HEADER] + [r.csv() for r in rows]) + "\n"
