"""Deterministic discrete-event simulator of parallel evolutionary
algorithms in which only fitness evaluations consume simulated time.

N simulated workers pull work items from a FIFO queue. A work item (task)
is a resumable step sequence: between evaluations it reads and writes
shared algorithm state atomically at a single simulated instant; each
evaluation occupies its worker for the solution's evaluation time.

Two execution modes are provided:

* synchronous -- one batch of tasks per generation with a barrier between
  generations. State effects are applied in slot order (the behavior of
  the sequential algorithm), while simulated time is accounted by list
  scheduling the batch onto the workers, so a generation's makespan is
  the parallel one. This makes the selection trace provably independent
  of the evaluation-time distribution.
* asynchronous -- tasks reschedule themselves; the simulation advances
  event by event ordered by (completion time, issue sequence number). At
  one instant all completions are processed before freed workers pull new
  work, so simultaneous finishers observe each other's effects.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Generator, Iterable

from .core import Genotype, Individual, Population, UNEVALUATED_FITNESS
from .rng import RandomSource

__all__ = [
    "EvalRequest",
    "TaskHandle",
    "SimulationConfig",
    "EventRecord",
    "RunStats",
    "Algorithm",
    "Simulation",
    "run_simulation",
]

# Abort if this many consecutive tasks finish without issuing a single
# evaluation; simulated time cannot advance past such a cycle.
_MAX_NOEVAL_STREAK = 10_000


@dataclass(frozen=True)
class EvalRequest:
    """Yielded by a task to evaluate a genotype; the engine resumes the
    task with the (fitness, eval_time) result at the completion instant."""

    genotype: Genotype


@dataclass
class TaskHandle:
    """Per-task identity: a stable serial number and a private random
    stream derived from (run seed, serial)."""

    id: int
    rng: RandomSource
    kind: str
    idx: int | None
    chain: bool


@dataclass
class SimulationConfig:
    """Run parameters and termination caps.

    ``n_workers`` of None means one worker per population slot. The
    simulated-time cap is checked per completion in asynchronous mode and
    at generation barriers in synchronous mode; the evaluation cap bounds
    issued evaluations in both. The stagnation rule terminates a run when
    more than ``2 e + 10 |P|`` evaluations were issued since the last
    improvement, where e is the number issued at that improvement.
    """

    pop_size: int
    seed: int
    n_workers: int | None = None
    max_sim_time: float | None = None
    max_evaluations: int | None = None
    stagnation: bool = False
    charge_noop_evals: bool = False
    record_events: bool = False

    def __post_init__(self):
        if self.pop_size < 2:
            raise ValueError("population size must be >= 2")
        if self.n_workers is not None and self.n_workers < 1:
            raise ValueError("worker count must be >= 1")

    @property
    def workers(self) -> int:
        return self.n_workers if self.n_workers is not None else self.pop_size


@dataclass(frozen=True)
class EventRecord:
    time: float
    worker: int
    kind: str
    evaluations_completed: int
    best_fitness: float


@dataclass
class RunStats:
    success: bool
    reason: str
    simulated_time: float
    evaluations_issued: int
    evaluations_completed: int
    idle_time: list[float]
    best_fitness: float
    best_individual: Individual | None
    best_trace: list[tuple[float, float]]
    generation_times: list[float]
    events: list[EventRecord] | None


class Algorithm:
    """Base class for the task-producing side of a simulation.

    Subclasses implement :meth:`_step_task` (and optionally the
    generation hooks used in synchronous mode) and set ``mode`` to
    ``"sync"`` or ``"async"``. Initialization is shared: each init task
    samples a random genotype, appends a placeholder slot, evaluates, and
    then keeps the better of the evaluated solution and whatever occupies
    the slot by completion time (an async-safe backtrack).
    """

    mode: str = "sync"
    kind: str = "algorithm"

    def __init__(self):
        self.sim: Simulation | None = None
        self.population: Population | None = None

    def bind(self, sim: "Simulation") -> None:
        self.sim = sim
        self.population = Population()

    def create_task(
        self, task: TaskHandle, is_init: bool, idx: int
    ) -> Generator:
        if is_init:
            return self._init_task(task)
        return self._step_task(task, idx)

    def _init_task(self, task: TaskHandle) -> Generator:
        pop = self.population
        g = Genotype.random(self.sim.problem.length, task.rng)
        idx = pop.append(Individual(g, UNEVALUATED_FITNESS, 0.0))
        f, t = yield EvalRequest(g)
        cand = Individual(g, f, t)
        if cand.fitness > pop[idx].fitness:
            pop.replace(idx, cand)
        return idx

    def _step_task(self, task: TaskHandle, idx: int) -> Generator:
        raise NotImplementedError

    def begin_generation(self) -> None:
        pass

    def end_generation(self) -> None:
        pass


class Simulation:
    """One deterministic run of an algorithm on a problem instance."""

    def __init__(
        self,
        problem,
        algorithm: Algorithm,
        config: SimulationConfig,
        observer: Callable[["Simulation"], None] | None = None,
    ):
        self.problem = problem
        self.algorithm = algorithm
        self.cfg = config
        self.observer = observer
        self.n_workers = config.workers
        self.root_rng = RandomSource(config.seed)

        self.now = 0.0
        self.issued = 0
        self.completed = 0
        self.best: Individual | None = None
        self._issued_at_improvement = 0
        self._reason: str | None = None
        self._task_serial = 0
        self._eval_serial = 0
        self._busy = [0.0] * self.n_workers
        self.generation_times: list[float] = []
        self.events: list[EventRecord] | None = (
            [] if config.record_events else None
        )
        self._trace: list[tuple[float, float]] = []
        # async-mode structures, exposed for observers
        self.queue: deque = deque()
        self.idle: list[int] = []
        self._heap: list = []

    # ------------------------------------------------------------------
    # shared bookkeeping

    @property
    def target_value(self) -> float:
        return self.problem.target_value

    @property
    def elitist(self) -> Individual | None:
        """Best individual over all evaluations performed so far."""
        return self.best

    def _new_handle(self, is_init: bool, idx: int, chain: bool) -> TaskHandle:
        kind = f"{self.algorithm.kind}.{'init' if is_init else 'step'}"
        handle = TaskHandle(
            self._task_serial,
            self.root_rng.split(self._task_serial),
            kind,
            idx,
            chain,
        )
        self._task_serial += 1
        return handle

    def _issue(self, g: Genotype) -> tuple[float, float] | None:
        """Account one evaluation; returns None when the cap terminates the
        run instead."""
        cap = self.cfg.max_evaluations
        if cap is not None and self.issued >= cap:
            self._reason = "eval_cap"
            return None
        self.issued += 1
        f, t = self.problem.evaluate(g)
        if (
            self.cfg.stagnation
            and self.issued - self._issued_at_improvement
            > 2 * self._issued_at_improvement + 10 * self.cfg.pop_size
        ):
            self._reason = "stagnation"
        return f, t

    def _note_result(self, g: Genotype, f: float, t: float) -> None:
        """Track the elitist; in synchronous mode this runs at issue time
        (sequential semantics), in asynchronous mode at completion time."""
        if self.best is None or f > self.best.fitness:
            self.best = Individual(g, f, t)
            self._issued_at_improvement = self.issued

    def _check_target(self, f: float) -> bool:
        if f >= self.target_value:
            self._reason = "target"
            return True
        return False

    # ------------------------------------------------------------------
    # synchronous mode

    def _run_sync(self) -> None:
        pop_size = self.cfg.pop_size
        self._sync_generation(True)
        while self._reason is None:
            if self.algorithm.population.converged():
                self._reason = "converged"
                break
            cap = self.cfg.max_sim_time
            if cap is not None and self.now > cap:
                self._reason = "time_cap"
                break
            self.algorithm.begin_generation()
            self._sync_generation(False)
            if self._reason is None:
                self.algorithm.end_generation()

    def _sync_generation(self, is_init: bool) -> None:
        """Run one batch: effects in slot order, timing by list scheduling."""
        alg = self.algorithm
        issued_evals: list[tuple[int, str, float, float]] = []  # task-grouped
        task_spans: list[list[int]] = []  # indices into issued_evals per task
        for slot in range(self.cfg.pop_size):
            handle = self._new_handle(is_init, slot, chain=False)
            gen = alg.create_task(handle, is_init, slot)
            span: list[int] = []
            send = None
            while True:
                try:
                    req = gen.send(send)
                except StopIteration:
                    break
                result = self._issue(req.genotype)
                if result is None:
                    break
                f, t = result
                self._note_result(req.genotype, f, t)
                span.append(len(issued_evals))
                issued_evals.append((handle.id, handle.kind, f, t))
                if self._check_target(f) or self._reason is not None:
                    break
                send = (f, t)
            task_spans.append(span)
            if self._reason is not None:
                break
        self._schedule_batch(issued_evals, task_spans)
        if self._reason is None:
            self.generation_times.append(self.now)

    def _schedule_batch(
        self,
        issued_evals: list[tuple[int, str, float, float]],
        task_spans: list[list[int]],
    ) -> None:
        """List-schedule the batch onto workers in issue order and emit
        the completion events that timing implies."""
        if not issued_evals:
            return
        free = [(self.now, w) for w in range(self.n_workers)]
        heapq.heapify(free)
        rows: list[tuple[float, int, int, str, float]] = []
        for span in task_spans:
            if not span:
                continue
            start, w = heapq.heappop(free)
            for i in span:
                _, kind, f, t = issued_evals[i]
                start += t
                self._busy[w] += t
                rows.append((start, self._eval_serial + i, w, kind, f))
            heapq.heappush(free, (start, w))
        self._eval_serial += len(issued_evals)
        rows.sort()
        self.now = rows[-1][0]
        for time, _seq, worker, kind, f in rows:
            self.completed += 1
            if not self._trace or f > self._trace[-1][1]:
                self._trace.append((time, f))
            if self.events is not None:
                self.events.append(
                    EventRecord(time, worker, kind, self.completed, self._trace[-1][1])
                )

    # ------------------------------------------------------------------
    # asynchronous mode

    def _enqueue(self, is_init: bool, idx: int) -> None:
        handle = self._new_handle(is_init, idx, chain=True)
        gen = self.algorithm.create_task(handle, is_init, idx)
        self.queue.append((gen, handle))

    def _advance(self, gen, handle: TaskHandle, send, worker: int) -> bool:
        """Resume a task until its next evaluation or its end; returns True
        when the task finished."""
        try:
            req = gen.send(send)
        except StopIteration as stop:
            heapq.heappush(self.idle, worker)
            if handle.chain and self._reason is None:
                idx = stop.value if stop.value is not None else handle.idx
                self._enqueue(False, idx)
            return True
        result = self._issue(req.genotype)
        if result is None:
            return True
        f, t = result
        heapq.heappush(
            self._heap,
            (self.now + t, self._eval_serial, worker, self.now, f, t, gen, handle, req.genotype),
        )
        self._eval_serial += 1
        return False

    def _run_async(self) -> None:
        for i in range(self.cfg.pop_size):
            self._enqueue(True, i)
        noeval_streak = 0
        while self._reason is None:
            while self.queue and self.idle and self._reason is None:
                worker = heapq.heappop(self.idle)
                gen, handle = self.queue.popleft()
                evals_before = self.issued
                finished = self._advance(gen, handle, None, worker)
                if finished and self.issued == evals_before:
                    noeval_streak += 1
                    if noeval_streak > _MAX_NOEVAL_STREAK:
                        raise RuntimeError(
                            "tasks are completing without evaluations; "
                            "simulated time cannot advance"
                        )
                else:
                    noeval_streak = 0
            if self.observer is not None:
                self.observer(self)
            if self._reason is not None:
                break
            if not self._heap:
                self._reason = "drained"
                break
            t = self._heap[0][0]
            while (
                self._heap and self._heap[0][0] == t and self._reason is None
            ):
                (
                    time,
                    _seq,
                    worker,
                    _issue_time,
                    f,
                    dur,
                    gen,
                    handle,
                    genotype,
                ) = heapq.heappop(self._heap)
                self.now = time
                self.completed += 1
                self._busy[worker] += dur
                self._note_result(genotype, f, dur)
                if not self._trace or f > self._trace[-1][1]:
                    self._trace.append((time, f))
                if self.events is not None:
                    self.events.append(
                        EventRecord(
                            time, worker, handle.kind, self.completed, self._trace[-1][1]
                        )
                    )
                if self._check_target(f):
                    break
                self._advance(gen, handle, (f, dur), worker)
                pop = self.algorithm.population
                if pop.size and pop.converged():
                    self._reason = "converged"
                    break
                cap = self.cfg.max_sim_time
                if cap is not None and self.now > cap:
                    self._reason = "time_cap"
                    break
        # workers still mid-evaluation were busy up to the final instant
        for entry in self._heap:
            _, _, worker, issue_time = entry[0], entry[1], entry[2], entry[3]
            self._busy[worker] += max(0.0, self.now - issue_time)

    # ------------------------------------------------------------------

    def run(self) -> RunStats:
        self.algorithm.bind(self)
        self.idle = list(range(self.n_workers))
        heapq.heapify(self.idle)
        if self.algorithm.mode == "sync":
            self._run_sync()
        else:
            self._run_async()
        reason = self._reason or "drained"
        return RunStats(
            success=reason == "target",
            reason=reason,
            simulated_time=self.now,
            evaluations_issued=self.issued,
            evaluations_completed=self.completed,
            idle_time=[self.now - b for b in self._busy],
            best_fitness=self.best.fitness if self.best else UNEVALUATED_FITNESS,
            best_individual=self.best,
            best_trace=list(self._trace),
            generation_times=list(self.generation_times),
            events=self.events,
        )


def run_simulation(
    problem,
    algorithm: Algorithm,
    config: SimulationConfig,
    observer: Callable[[Simulation], None] | None = None,
) -> RunStats:
    return Simulation(problem, algorithm, config, observer).run()


def events_to_csv(events: Iterable[EventRecord]) -> str:
    lines = ["time,worker,kind,evaluations_completed,best_fitness"]
    for e in events:
        lines.append(
            f"{e.time!r},{e.worker},{e.kind},{e.evaluations_completed},{e.best_fitness!r}"
        )
    return "\n".join(lines) + "\n"
