"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class RunRequest(BaseModel):
    algorithm: str
    problem: str
    ratio: str = "1:1"
    pop_size: int
    seed: int = 0
    processors: int | None = None
    max_sim_time: float | None = None
    max_evaluations: int | None = 2_000_000
    stagnation: bool = False
    charge_noop_evals: bool = False
    event_log: bool = False


class RunResponse(BaseModel):
    success: bool
    reason: str
    simulated_time: float
    evaluations_issued: int
    evaluations_completed: int
    best_fitness: float
    target_value: float
    generations: int
    total_idle_time: float
    event_log_csv: str | None = None


class SearchRequest(BaseModel):
    algorithm: str
    problem: str
    ratio: str = "1:1"
    seed: int = 0
    processors: int | None = None
    base_pop: int = 8
    max_pop: int = 4096
    max_sim_time: float | None = None
    max_evaluations: int | None = 2_000_000
    stagnation: bool = False
    charge_noop_evals: bool = False


class ProbeModel(BaseModel):
    pop_size: int
    success: bool
    simulated_time: float
    evaluations: int
    reason: str


class BisectResponse(BaseModel):
    seed: int
    failed: bool
    minimal_pop: int | None
    trace: list[ProbeModel]


class GoldenResponse(BaseModel):
    seed: int
    failed: bool
    best_pop: int | None
    best_time: float | None
    probes: dict[int, float | None]


class MatrixRequest(BaseModel):
    algorithms: list[str]
    problem: str
    ratios: list[str] = Field(default_factory=lambda: ["1:1"])
    seeds: list[int] = Field(default_factory=lambda: [0])
    processors: int | None = None
    base_pop: int = 8
    max_pop: int = 4096
    max_sim_time: float | None = None
    max_evaluations: int | None = 2_000_000
    stagnation: bool = False
    jobs: int = 1
    alpha: float = 0.05


class MatrixResponse(BaseModel):
    csv: str
    aggregates: dict
    tests: dict


class GenProblemRequest(BaseModel):
    length: int
    k: int = 5
    stride: int = 2
    seed: int = 0
    ratio: str = "1:1"


class GenProblemResponse(BaseModel):
    instance: dict
    target_value: float
    optimum: str


class AlgorithmsResponse(BaseModel):
    algorithms: list[str]
    paper_ratios: list[str]
