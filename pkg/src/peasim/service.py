"""HTTP service wrapping the simulator and the experiment harness.

Endpoints mirror the CLI subcommands; identical requests produce
byte-identical payloads, so clients can persist responses as reproducible
artifacts.
"""

from __future__ import annotations

import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .catalog import (
    ConfigError,
    PAPER_RATIOS,
    algorithm_ids,
    build_problem,
    parse_ratio,
)
from .engine import events_to_csv
from .harness import (
    ExperimentConfig,
    bisect_min_popsize,
    golden_min_time,
    rows_to_csv,
    run_experiment_matrix,
    run_single,
)
from .problems import ankl_problem, instance_to_json
from .schemas import (
    AlgorithmsResponse,
    BisectResponse,
    GenProblemRequest,
    GenProblemResponse,
    GoldenResponse,
    MatrixRequest,
    MatrixResponse,
    ProbeModel,
    RunRequest,
    RunResponse,
    SearchRequest,
)

app = FastAPI(
    title="peasim",
    description="Simulated parallel evolutionary algorithms with "
    "genotype-dependent evaluation times",
    version=__version__,
)


@app.exception_handler(ConfigError)
async def config_error_handler(_request: Request, exc: ConfigError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


def _experiment_config(req: SearchRequest | RunRequest, **overrides) -> ExperimentConfig:
    return ExperimentConfig(
        algorithm=req.algorithm,
        problem=req.problem,
        ratio=req.ratio,
        processors=req.processors,
        max_sim_time=req.max_sim_time,
        max_evaluations=req.max_evaluations,
        stagnation=req.stagnation,
        charge_noop_evals=getattr(req, "charge_noop_evals", False),
        **overrides,
    )


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/algorithms", response_model=AlgorithmsResponse)
def algorithms() -> AlgorithmsResponse:
    return AlgorithmsResponse(algorithms=algorithm_ids(), paper_ratios=PAPER_RATIOS)


@app.post("/run", response_model=RunResponse)
def run(req: RunRequest) -> RunResponse:
    cfg = _experiment_config(req)
    stats = run_single(cfg, req.seed, req.pop_size, record_events=req.event_log)
    problem = build_problem(req.problem, parse_ratio(req.ratio))
    return RunResponse(
        success=stats.success,
        reason=stats.reason,
        simulated_time=stats.simulated_time,
        evaluations_issued=stats.evaluations_issued,
        evaluations_completed=stats.evaluations_completed,
        best_fitness=stats.best_fitness,
        target_value=problem.target_value,
        generations=len(stats.generation_times),
        total_idle_time=sum(stats.idle_time),
        event_log_csv=events_to_csv(stats.events) if stats.events is not None else None,
    )


@app.post("/bisect", response_model=BisectResponse)
def bisect(req: SearchRequest) -> BisectResponse:
    cfg = _experiment_config(req, base_pop=req.base_pop, max_pop=req.max_pop)
    result = bisect_min_popsize(cfg, req.seed)
    return BisectResponse(
        seed=result.seed,
        failed=result.failed,
        minimal_pop=result.minimal_pop,
        trace=[ProbeModel(**p.__dict__) for p in result.trace],
    )


@app.post("/goldensection", response_model=GoldenResponse)
def goldensection(req: SearchRequest) -> GoldenResponse:
    cfg = _experiment_config(req, base_pop=req.base_pop, max_pop=req.max_pop)
    result = golden_min_time(cfg, req.seed)
    return GoldenResponse(
        seed=result.seed,
        failed=result.failed,
        best_pop=result.best_pop,
        best_time=None if result.failed else result.best_time,
        probes={
            p: (None if math.isinf(t) else t) for p, t in sorted(result.probes.items())
        },
    )


@app.post("/matrix", response_model=MatrixResponse)
def matrix(req: MatrixRequest) -> MatrixResponse:
    base = ExperimentConfig(
        algorithm=req.algorithms[0] if req.algorithms else "",
        problem=req.problem,
        processors=req.processors,
        base_pop=req.base_pop,
        max_pop=req.max_pop,
        max_sim_time=req.max_sim_time,
        max_evaluations=req.max_evaluations,
        stagnation=req.stagnation,
    )
    if not req.algorithms:
        raise ConfigError("matrix needs at least one algorithm")
    result = run_experiment_matrix(
        base, req.algorithms, req.ratios, req.seeds, jobs=req.jobs, alpha=req.alpha
    )
    return MatrixResponse(
        csv=rows_to_csv(result.rows),
        aggregates=result.aggregates,
        tests=result.tests,
    )


@app.post("/problems/generate", response_model=GenProblemResponse)
def generate_problem(req: GenProblemRequest) -> GenProblemResponse:
    if req.length < req.k or (req.length - req.k + 1) % req.stride:
        raise ConfigError(
            f"length {req.length} incompatible with k={req.k}, stride={req.stride}"
        )
    n_blocks = (req.length - req.k + 1) // req.stride
    instance = ankl_problem(
        n_blocks, req.k, req.stride, req.seed, parse_ratio(req.ratio)
    )
    return GenProblemResponse(
        instance=instance_to_json(instance),
        target_value=instance.target_value,
        optimum=instance.time_model.optimum.to01(),
    )
