"""GOMEA: linkage-tree learning (normalized mutual information + UPGMA)
and gene-pool optimal mixing with forced improvements.

One task is an entire mixing pass over one population slot: for each
linkage subset, copy a random donor's bits in, evaluate when the genotype
changed, and keep the change iff fitness did not drop. Three parallel
variants exist: ``sync`` writes offspring back generationally at the
barrier, ``ae`` writes a slot back when its pass ends, and ``ai``
additionally publishes every accepted intermediate change.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Generator

import numpy as np

from .core import Individual, bit_matrix
from .engine import Algorithm, EvalRequest, TaskHandle
from .rng import RandomSource

__all__ = [
    "nmi_matrix",
    "learn_linkage_tree",
    "FamilyOfSubsets",
    "Gomea",
]

VARIANTS = ("sync", "ae", "ai")


def _xlogx(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log2(p[nz])
    return out


def nmi_matrix(members: list[Individual], length: int) -> np.ndarray:
    """Pairwise normalized mutual information 2 I(i,j) / (H(i) + H(j)) of
    the population's variables, with base-2 entropies over observed
    frequencies. A pair of constant variables gets NMI 1."""
    if len(members) < 2:
        raise ValueError("need at least two members")
    m = bit_matrix(members, length).astype(np.float64)
    n = m.shape[0]
    ones = m.sum(axis=0)
    p1 = ones / n
    h = -(_xlogx(p1) + _xlogx(1.0 - p1))
    n11 = m.T @ m
    n10 = ones[:, None] - n11
    n01 = ones[None, :] - n11
    n00 = n - n11 - n10 - n01
    h_joint = -sum(
        _xlogx(c / n) for c in (n00, n01, n10, n11)
    )
    denom = h[:, None] + h[None, :]
    info = np.maximum(denom - h_joint, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        nmi = np.where(denom > 0, 2.0 * info / np.where(denom > 0, denom, 1.0), 1.0)
    np.fill_diagonal(nmi, 1.0)
    return np.clip(nmi, 0.0, 1.0)


def _upgma_merges(sim: np.ndarray) -> list[tuple[int, ...]]:
    """Agglomerate singletons by unweighted pair-group average similarity;
    returns every merged subset in merge order, except the final root.
    Equal similarities merge the lexicographically smallest cluster pair."""
    clusters: list[tuple[int, ...]] = [(i,) for i in range(sim.shape[0])]
    sims: dict[tuple[tuple[int, ...], tuple[int, ...]], float] = {}
    for i in range(len(clusters)):
        for j in range(i + 1, len(clusters)):
            sims[(clusters[i], clusters[j])] = float(sim[i, j])

    def pair_sim(a, b):
        return sims[(a, b)] if (a, b) in sims else sims[(b, a)]

    merges: list[tuple[int, ...]] = []
    while len(clusters) > 1:
        best = None
        best_key = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                s = pair_sim(clusters[i], clusters[j])
                key = tuple(sorted((clusters[i], clusters[j])))
                if best is None or s > best[0] or (s == best[0] and key < best_key):
                    best = (s, i, j)
                    best_key = key
        _, i, j = best
        a, b = clusters[i], clusters[j]
        merged = tuple(sorted(a + b))
        for c in clusters:
            if c is a or c is b:
                continue
            s = (len(a) * pair_sim(a, c) + len(b) * pair_sim(b, c)) / (
                len(a) + len(b)
            )
            sims[(merged, c)] = s
        clusters[i] = merged
        del clusters[j]
        merges.append(merged)
    return merges[:-1]


@dataclass
class FamilyOfSubsets:
    """Linkage-tree subsets flattened into a list: every singleton plus
    every internal merge except the root. ``masks`` are the subsets as bit
    masks; ``uses_left`` counts mixing passes until the next relearn."""

    subsets: tuple[tuple[int, ...], ...]
    masks: tuple[int, ...]
    uses_left: int


def learn_linkage_tree(members: list[Individual], length: int) -> FamilyOfSubsets:
    merges = _upgma_merges(nmi_matrix(members, length))
    subsets = tuple([(i,) for i in range(length)] + merges)
    masks = tuple(sum(1 << pos for pos in s) for s in subsets)
    return FamilyOfSubsets(subsets, masks, uses_left=len(members))


class Gomea(Algorithm):
    kind = "gomea"

    def __init__(self, variant: str):
        super().__init__()
        if variant not in VARIANTS:
            raise ValueError(f"unknown gomea variant {variant!r}")
        self.variant = variant
        self.mode = "sync" if variant == "sync" else "async"

    def bind(self, sim) -> None:
        super().bind(sim)
        pop_size = sim.cfg.pop_size
        self.fos: FamilyOfSubsets | None = None
        self.stretch = [0] * pop_size
        # Forced improvements kick in after this many consecutive mixing
        # passes without strict improvement.
        self.stretch_threshold = 1 + (pop_size.bit_length() - 1)
        self.offspring: list[Individual] | None = None
        self.gom_trace: list[tuple[int, float, float]] | None = None

    def begin_generation(self) -> None:
        self.offspring = list(self.population.members)

    def end_generation(self) -> None:
        self.population.replace_all(self.offspring)
        self.offspring = None

    def _gom_pass(
        self,
        task: TaskHandle,
        current: Individual,
        idx: int,
        order: list[int],
        snapshot: list[Individual],
        donor: Individual | None,
        first_improvement: bool,
    ) -> Generator:
        """One mixing pass; yields evaluations, returns (result, changed).

        With ``donor`` fixed (forced improvements) acceptance requires a
        strict improvement over the fitness at pass start and the pass
        stops at the first one; otherwise any non-worsening change is
        accepted. Steps that leave the genotype unchanged are free unless
        noop charging is configured.
        """
        base = current.fitness
        changed = False
        publish = self.variant == "ai"
        for ei in order:
            mask = self.fos.masks[ei]
            d = (
                donor
                if donor is not None
                else snapshot[task.rng.integer(len(snapshot))]
            )
            g2 = current.genotype.with_mask_from(d.genotype, mask)
            if g2.bits == current.genotype.bits:
                if self.sim.cfg.charge_noop_evals:
                    yield EvalRequest(current.genotype)
                continue
            f, t = yield EvalRequest(g2)
            accept = f > base if first_improvement else f >= current.fitness
            if accept:
                current = Individual(g2, f, t)
                changed = True
                if publish:
                    self.population.replace(idx, current)
                if first_improvement:
                    break
        return current, changed

    def _step_task(self, task: TaskHandle, idx: int) -> Generator:
        pop = self.population
        if self.fos is None or self.fos.uses_left == 0:
            self.fos = learn_linkage_tree(pop.members, self.sim.problem.length)
        self.fos.uses_left -= 1
        snapshot = list(pop.members)
        start = self.offspring[idx] if self.variant == "sync" else pop[idx]
        order = task.rng.permutation(len(self.fos.subsets))
        current, changed = yield from self._gom_pass(
            task, start, idx, order, snapshot, donor=None, first_improvement=False
        )
        if not changed or self.stretch[idx] >= self.stretch_threshold:
            elitist = self.sim.elitist
            fi_order = task.rng.permutation(len(self.fos.subsets))
            improved, fi_changed = yield from self._gom_pass(
                task,
                current,
                idx,
                fi_order,
                snapshot,
                donor=elitist,
                first_improvement=True,
            )
            current = improved if fi_changed else elitist
        if current.fitness > start.fitness:
            self.stretch[idx] = 0
        else:
            self.stretch[idx] += 1
        if self.gom_trace is not None:
            self.gom_trace.append((idx, start.fitness, current.fitness))
        if self.variant == "sync":
            self.offspring[idx] = current
        else:
            pop.replace(idx, current)
        return idx
