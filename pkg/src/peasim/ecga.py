"""Extended compact GA: a marginal product model (disjoint variable
partition with per-subset frequency tables) learned by greedy MDL merging
from a tournament-selected population and sampled to create offspring.

The model is shared across a simulation's tasks and refreshed exactly once
per population-size worth of samples, which amounts to a relearn at every
generation boundary in the synchronous mode and to sampling from stale
frequencies between refreshes in the asynchronous mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Generator

import numpy as np

from .core import Genotype, Individual, bit_matrix
from .engine import Algorithm, EvalRequest, TaskHandle
from .ga import make_selection, shuffled_tournament
from .rng import RandomSource

__all__ = [
    "MarginalProductModel",
    "fit_partition",
    "learn_mpm",
    "Ecga",
]

# Bound on merged subset size; 2^size table cells must stay tractable.
MAX_SUBSET_SIZE = 12


def _subset_entropy(matrix: np.ndarray, cols: tuple[int, ...]) -> float:
    """Base-2 entropy of the empirical joint distribution of the given
    columns."""
    sub = np.packbits(matrix[:, cols], axis=1, bitorder="little")
    _, counts = np.unique(sub, axis=0, return_counts=True)
    p = counts / matrix.shape[0]
    return float(-(p * np.log2(p)).sum())


def fit_partition(
    matrix: np.ndarray, max_subset: int = MAX_SUBSET_SIZE
) -> list[tuple[int, ...]]:
    """Greedy MDL partition of the columns of a 0/1 sample matrix.

    Starting univariate, repeatedly merge the pair of subsets that most
    reduces combined complexity

        C = log2(N + 1) * sum((2^|s| - 1)) + N * sum(entropy(s))

    and stop when no merge reduces it. Ties prefer the lowest index pair;
    a merged subset takes the lower index.
    """
    n_samples, n_cols = matrix.shape
    model_unit = math.log2(n_samples + 1)
    subsets: list[tuple[int, ...]] = [(i,) for i in range(n_cols)]
    entropy: dict[tuple[int, ...], float] = {
        s: _subset_entropy(matrix, s) for s in subsets
    }
    while len(subsets) > 1:
        best_delta = 0.0
        best_pair: tuple[int, int] | None = None
        best_union: tuple[int, ...] | None = None
        for i in range(len(subsets)):
            si = subsets[i]
            for j in range(i + 1, len(subsets)):
                sj = subsets[j]
                if len(si) + len(sj) > max_subset:
                    continue
                union = tuple(sorted(si + sj))
                if union not in entropy:
                    entropy[union] = _subset_entropy(matrix, union)
                d_model = model_unit * (
                    (1 << len(union)) - (1 << len(si)) - (1 << len(sj)) + 1
                )
                d_data = n_samples * (entropy[union] - entropy[si] - entropy[sj])
                delta = d_model + d_data
                if delta < best_delta:
                    best_delta = delta
                    best_pair = (i, j)
                    best_union = union
        if best_pair is None:
            break
        i, j = best_pair
        subsets[i] = best_union
        del subsets[j]
    return subsets


@dataclass
class MarginalProductModel:
    """Disjoint variable partition with per-subset frequency tables over
    the sub-genotypes observed in the selected population.

    Each table row is (pattern placed at the subset's positions, count);
    counts per subset sum to the selected-population size. ``uses_left``
    tracks how many samples remain before a relearn is due.
    """

    partition: tuple[tuple[int, ...], ...]
    tables: tuple[tuple[tuple[int, int], ...], ...]
    total: int
    length: int
    uses_left: int

    def sample(self, rng: RandomSource) -> Genotype:
        """Draw one genotype, each subset independently with probability
        proportional to its observed frequency."""
        if self.uses_left <= 0:
            raise RuntimeError("model exhausted; a relearn is required first")
        bits = 0
        for table in self.tables:
            r = rng.integer(self.total)
            acc = 0
            for placed, count in table:
                acc += count
                if r < acc:
                    bits |= placed
                    break
        self.uses_left -= 1
        return Genotype(bits, self.length)


def learn_mpm(
    members: list[Individual],
    length: int,
    rng: RandomSource,
    max_subset: int = MAX_SUBSET_SIZE,
) -> MarginalProductModel:
    """Tournament-select size-4 winners from the population (as many as its
    size), fit the MDL partition on them and build the frequency tables."""
    selected = shuffled_tournament(members, len(members), 4, rng)
    matrix = bit_matrix(selected, length)
    partition = fit_partition(matrix, max_subset)
    tables = []
    for subset in partition:
        counts: dict[int, int] = {}
        for row in matrix[:, subset]:
            placed = 0
            for bit, pos in zip(row, subset):
                if bit:
                    placed |= 1 << pos
            counts[placed] = counts.get(placed, 0) + 1
        tables.append(tuple(sorted(counts.items())))
    return MarginalProductModel(
        partition=tuple(partition),
        tables=tuple(tables),
        total=len(selected),
        length=length,
        uses_left=len(selected),
    )


class Ecga(Algorithm):
    kind = "ecga"

    def __init__(self, mode: str, selection_kind: str):
        super().__init__()
        if mode not in ("sync", "async"):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.selection_kind = selection_kind

    def bind(self, sim) -> None:
        super().bind(sim)
        self.selection = make_selection(self.selection_kind, sim.cfg.pop_size)
        self.model: MarginalProductModel | None = None
        self.model_refreshes = 0

    def _step_task(self, task: TaskHandle, idx: int) -> Generator:
        if self.model is None or self.model.uses_left == 0:
            self.model = learn_mpm(
                self.population.members, self.sim.problem.length, task.rng
            )
            self.model_refreshes += 1
        g = self.model.sample(task.rng)
        f, t = yield EvalRequest(g)
        self.selection.apply(self.population, Individual(g, f, t), task.rng)
        return idx
