"""Simple GA tasks: sync/async x steady-state/generational selection with
uniform, two-point and subfunction crossover.

The GA has no mutation; every offspring is one crossover of two parents
sampled uniformly with replacement. In synchronous mode the parents of a
whole batch are fixed at generation start.
"""

from __future__ import annotations

from typing import Generator

from .core import Genotype, Individual, Population
from .engine import Algorithm, EvalRequest, TaskHandle
from .rng import RandomSource

__all__ = [
    "uniform_crossover",
    "two_point_crossover",
    "subfunction_crossover",
    "Crossover",
    "shuffled_tournament",
    "SteadyState",
    "GenerationalPool",
    "SimpleGa",
]

CROSSOVER_KINDS = ("ux", "tpx", "sfx")
SELECTION_KINDS = ("ss", "gen")


def uniform_crossover(p0: Genotype, p1: Genotype, rng: RandomSource) -> Genotype:
    """Each position independently from either parent with p = 0.5."""
    if p0.length != p1.length:
        raise ValueError("parent lengths differ")
    nbytes = (p0.length + 7) // 8
    mask = int.from_bytes(rng.bytes(nbytes), "little") & ((1 << p0.length) - 1)
    return p0.with_mask_from(p1, mask)


def two_point_crossover(p0: Genotype, p1: Genotype, rng: RandomSource) -> Genotype:
    """Two cut points chosen uniformly; the middle segment comes from the
    second parent."""
    if p0.length != p1.length:
        raise ValueError("parent lengths differ")
    c1 = rng.integer(p0.length + 1)
    c2 = rng.integer(p0.length + 1)
    if c1 > c2:
        c1, c2 = c2, c1
    mask = ((1 << c2) - 1) ^ ((1 << c1) - 1)
    return p0.with_mask_from(p1, mask)


def subfunction_crossover(
    p0: Genotype, p1: Genotype, block_masks: tuple[int, ...], rng: RandomSource
) -> Genotype:
    """Each block taken wholesale from either parent with p = 0.5."""
    if p0.length != p1.length:
        raise ValueError("parent lengths differ")
    nbytes = (len(block_masks) + 7) // 8
    picks = int.from_bytes(rng.bytes(nbytes), "little")
    mask = 0
    for i, bm in enumerate(block_masks):
        if picks >> i & 1:
            mask |= bm
    return p0.with_mask_from(p1, mask)


class Crossover:
    """Crossover operator selected by kind; SFX carries the problem's
    disjoint subfunction partition."""

    def __init__(
        self,
        kind: str,
        length: int,
        partition: tuple[tuple[int, ...], ...] | None = None,
    ):
        if kind not in CROSSOVER_KINDS:
            raise ValueError(f"unknown crossover kind {kind!r}")
        self.kind = kind
        self.length = length
        self.block_masks: tuple[int, ...] | None = None
        if kind == "sfx":
            if partition is None:
                raise ValueError("sfx requires a subfunction partition")
            covered = 0
            for block in partition:
                bm = 0
                for pos in block:
                    bm |= 1 << pos
                if covered & bm:
                    raise ValueError("sfx partition blocks overlap")
                covered |= bm
            if covered != (1 << length) - 1:
                raise ValueError("sfx partition must cover every position")
            self.block_masks = tuple(
                sum(1 << pos for pos in block) for block in partition
            )

    def __call__(self, p0: Genotype, p1: Genotype, rng: RandomSource) -> Genotype:
        if self.kind == "ux":
            return uniform_crossover(p0, p1, rng)
        if self.kind == "tpx":
            return two_point_crossover(p0, p1, rng)
        return subfunction_crossover(p0, p1, self.block_masks, rng)


def shuffled_tournament(
    candidates: list[Individual], count: int, size: int, rng: RandomSource
) -> list[Individual]:
    """Tournament selection by shuffling and splitting into consecutive
    blocks of ``size``, reshuffling as often as needed for ``count``
    winners. Within a block the first fittest candidate wins."""
    if len(candidates) < size:
        raise ValueError("fewer candidates than the tournament size")
    winners: list[Individual] = []
    while len(winners) < count:
        order = rng.permutation(len(candidates))
        for start in range(0, len(candidates) - size + 1, size):
            block = order[start : start + size]
            best = max(block, key=lambda i: candidates[i].fitness)
            winners.append(candidates[best])
            if len(winners) == count:
                break
    return winners


class SteadyState:
    """Replace a uniformly chosen member iff it is strictly worse than the
    offspring; ties keep the incumbent, so mean fitness never decreases."""

    def apply(self, pop: Population, s: Individual, rng: RandomSource) -> None:
        j = rng.integer(pop.size)
        if pop[j].fitness < s.fitness:
            pop.replace(j, s)


class GenerationalPool:
    """Collect offspring until one per population slot has arrived, then
    replace the population by a parents+offspring tournament of size 4."""

    def __init__(self, pop_size: int):
        if pop_size < 4 or pop_size % 2:
            raise ValueError(
                "generational pool selection needs an even population of >= 4"
            )
        self.pop_size = pop_size
        self.pool: list[Individual] = []

    def apply(self, pop: Population, s: Individual, rng: RandomSource) -> None:
        self.pool.append(s)
        if len(self.pool) == self.pop_size:
            candidates = list(pop.members) + self.pool
            pop.replace_all(shuffled_tournament(candidates, self.pop_size, 4, rng))
            self.pool = []


def make_selection(kind: str, pop_size: int):
    if kind == "ss":
        return SteadyState()
    if kind == "gen":
        return GenerationalPool(pop_size)
    raise ValueError(f"unknown selection kind {kind!r}")


class SimpleGa(Algorithm):
    kind = "ga"

    def __init__(self, mode: str, selection_kind: str, crossover: Crossover):
        super().__init__()
        if mode not in ("sync", "async"):
            raise ValueError(f"unknown mode {mode!r}")
        if selection_kind not in SELECTION_KINDS:
            raise ValueError(f"unknown selection kind {selection_kind!r}")
        self.mode = mode
        self.selection_kind = selection_kind
        self.crossover = crossover

    def bind(self, sim) -> None:
        super().bind(sim)
        self.selection = make_selection(self.selection_kind, sim.cfg.pop_size)
        self._batch_parents: list[Individual] | None = None

    def begin_generation(self) -> None:
        # Parents of a synchronous batch are fixed when the batch starts,
        # so mid-batch replacements never feed the same batch's crossover.
        self._batch_parents = list(self.population.members)

    def _step_task(self, task: TaskHandle, idx: int) -> Generator:
        parents = (
            self._batch_parents
            if self.mode == "sync" and self._batch_parents is not None
            else self.population.members
        )
        p0 = parents[task.rng.integer(len(parents))]
        p1 = parents[task.rng.integer(len(parents))]
        child = self.crossover(p0.genotype, p1.genotype, task.rng)
        f, t = yield EvalRequest(child)
        self.selection.apply(self.population, Individual(child, f, t), task.rng)
        return idx
