"""Shared domain types: genotypes, individuals, populations.

Genotypes are fixed-length bitstrings stored as Python integers (bit i of
``bits`` is position i). All types here are immutable values except
:class:`Population`, which is the single piece of shared mutable state a
simulation owns; it keeps a multiset of genotypes so convergence checks
are O(1).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .rng import RandomSource

__all__ = [
    "Genotype",
    "Individual",
    "Population",
    "UNEVALUATED_FITNESS",
    "hamming_normalized",
    "population_converged",
    "bit_matrix",
]

# Fitness assigned to a population slot between its creation and the
# completion of its first evaluation; compares below every real fitness.
UNEVALUATED_FITNESS = float("-inf")


@dataclass(frozen=True)
class Genotype:
    """Fixed-length bitstring; ``bits`` holds position i at bit i."""

    bits: int
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("genotype length must be >= 1")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("bits outside genotype length")

    @classmethod
    def random(cls, length: int, rng: RandomSource) -> "Genotype":
        nbytes = (length + 7) // 8
        bits = int.from_bytes(rng.bytes(nbytes), "little") & ((1 << length) - 1)
        return cls(bits, length)

    @classmethod
    def from01(cls, text: str) -> "Genotype":
        """Parse a '0101...' string; character i is position i."""
        if not text or any(c not in "01" for c in text):
            raise ValueError("genotype string must be nonempty and binary")
        bits = 0
        for i, c in enumerate(text):
            if c == "1":
                bits |= 1 << i
        return cls(bits, len(text))

    def to01(self) -> str:
        return "".join("1" if self.bits >> i & 1 else "0" for i in range(self.length))

    def bit(self, i: int) -> int:
        return self.bits >> i & 1

    def ones(self) -> int:
        return self.bits.bit_count()

    def complement(self) -> "Genotype":
        return Genotype(~self.bits & ((1 << self.length) - 1), self.length)

    def hamming(self, other: "Genotype") -> int:
        if self.length != other.length:
            raise ValueError("genotype lengths differ")
        return (self.bits ^ other.bits).bit_count()

    def with_mask_from(self, donor: "Genotype", mask: int) -> "Genotype":
        """Copy of self with the masked positions taken from donor."""
        return Genotype((self.bits & ~mask) | (donor.bits & mask), self.length)

    def __str__(self) -> str:  # pragma: no cover
        return self.to01()


def hamming_normalized(a: Genotype, b: Genotype) -> float:
    """Fraction of positions at which a and b differ, in [0, 1]."""
    if a.length != b.length:
        raise ValueError("genotype lengths differ")
    return a.hamming(b) / a.length


@dataclass(frozen=True)
class Individual:
    """A genotype together with the fitness and evaluation time (simulated
    seconds) produced by the single evaluation that created it."""

    genotype: Genotype
    fitness: float
    eval_time: float

    @property
    def evaluated(self) -> bool:
        return self.fitness != UNEVALUATED_FITNESS


class Population:
    """Ordered sequence of individuals with O(1) convergence checks.

    All mutation goes through :meth:`append`, :meth:`replace` and
    :meth:`replace_all` so the internal genotype multiset stays in sync.
    """

    def __init__(self, members: list[Individual] | None = None):
        self.members: list[Individual] = list(members or [])
        self._genotypes = Counter(ind.genotype.bits for ind in self.members)

    @property
    def size(self) -> int:
        return len(self.members)

    def __getitem__(self, idx: int) -> Individual:
        return self.members[idx]

    def append(self, ind: Individual) -> int:
        """Add a member and return its index."""
        self.members.append(ind)
        self._genotypes[ind.genotype.bits] += 1
        return len(self.members) - 1

    def replace(self, idx: int, ind: Individual) -> None:
        old = self.members[idx]
        self._genotypes[old.genotype.bits] -= 1
        if not self._genotypes[old.genotype.bits]:
            del self._genotypes[old.genotype.bits]
        self.members[idx] = ind
        self._genotypes[ind.genotype.bits] += 1

    def replace_all(self, members: list[Individual]) -> None:
        self.members = list(members)
        self._genotypes = Counter(ind.genotype.bits for ind in self.members)

    def converged(self) -> bool:
        """True iff all genotypes are pairwise identical; empty is an error."""
        if not self.members:
            raise ValueError("convergence is undefined for an empty population")
        return len(self._genotypes) == 1

    def mean_fitness(self) -> float:
        if not self.members:
            raise ValueError("mean fitness of an empty population")
        return sum(ind.fitness for ind in self.members) / len(self.members)

    def best(self) -> tuple[int, Individual]:
        if not self.members:
            raise ValueError("best of an empty population")
        idx = max(range(len(self.members)), key=lambda i: self.members[i].fitness)
        return idx, self.members[idx]


def population_converged(pop: Population) -> bool:
    return pop.converged()


def bit_matrix(members: list[Individual], length: int) -> np.ndarray:
    """Genotypes of the given individuals as a (count, length) uint8 array;
    column i is bitstring position i."""
    nbytes = (length + 7) // 8
    raw = b"".join(ind.genotype.bits.to_bytes(nbytes, "little") for ind in members)
    packed = np.frombuffer(raw, dtype=np.uint8).reshape(len(members), nbytes)
    return np.unpackbits(packed, axis=1, bitorder="little")[:, :length]
