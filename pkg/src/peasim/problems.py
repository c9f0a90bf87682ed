"""Benchmark fitness functions and the genotype-dependent evaluation-time
model.

Two problem families are provided: the concatenated deceptive trap (DT) and
adjacent NK-landscapes (ANKL). Evaluation time is affine in the normalized
Hamming distance to the optimum: a solution at distance H costs
``H * a + (1 - H) * b`` simulated seconds, so the optimum costs exactly
``b`` and its bitwise complement exactly ``a``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Genotype, hamming_normalized
from .rng import RandomSource

__all__ = [
    "TimeModel",
    "make_time_model",
    "dt_block_value",
    "DeceptiveTrap",
    "AdjacentNk",
    "generate_ankl",
    "ankl_optimum",
    "ProblemInstance",
    "dt_problem",
    "ankl_problem",
    "dt_partition",
    "ankl_partition",
    "instance_to_json",
    "instance_from_json",
]


@dataclass(frozen=True)
class TimeModel:
    """Evaluation-time endpoints: ``a`` at the optimum's complement, ``b``
    at the optimum, interpolated linearly in normalized Hamming distance."""

    a: float
    b: float
    optimum: Genotype

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("time model endpoints must be positive")

    def eval_time(self, g: Genotype) -> float:
        h = hamming_normalized(g, self.optimum)
        return h * self.a + (1.0 - h) * self.b


def make_time_model(ratio: tuple[float, float], optimum: Genotype) -> TimeModel:
    a, b = ratio
    return TimeModel(float(a), float(b), optimum)


def dt_block_value(u: int, k: int) -> int:
    """Deceptive trap block score for unitation u: k when the block is all
    ones, otherwise k - u - 1 (gradient points toward all zeroes)."""
    if not 0 <= u <= k:
        raise ValueError(f"unitation {u} outside [0, {k}]")
    return k if u == k else k - u - 1


@dataclass(frozen=True)
class DeceptiveTrap:
    """Concatenation of n_blocks disjoint k-bit trap blocks; the optimum is
    the all-ones string with fitness n_blocks * k."""

    n_blocks: int
    k: int

    def __post_init__(self):
        if self.n_blocks < 1 or self.k < 1:
            raise ValueError("n_blocks and k must be >= 1")

    @property
    def length(self) -> int:
        return self.n_blocks * self.k

    @property
    def optimum(self) -> Genotype:
        return Genotype((1 << self.length) - 1, self.length)

    @property
    def optimum_value(self) -> float:
        return float(self.n_blocks * self.k)

    def fitness(self, g: Genotype) -> float:
        if g.length != self.length:
            raise ValueError("genotype length mismatch")
        k = self.k
        block_mask = (1 << k) - 1
        bits = g.bits
        total = 0
        for _ in range(self.n_blocks):
            u = (bits & block_mask).bit_count()
            total += k if u == k else k - u - 1
            bits >>= k
        return float(total)


@dataclass(frozen=True)
class AdjacentNk:
    """Adjacent NK-landscape: n_blocks overlapping k-bit windows placed at
    multiples of ``stride``, each scored by its own random lookup table.

    The genotype length is ``stride * n_blocks + k - 1``; with stride > 1
    the trailing stride - 1 positions fall outside every window and do not
    affect fitness. Table index: window bit at the lowest position is the
    least significant bit.
    """

    n_blocks: int
    k: int
    stride: int
    tables: tuple[tuple[float, ...], ...]
    seed: int | None = None

    def __post_init__(self):
        if self.n_blocks < 1 or self.k < 1:
            raise ValueError("n_blocks and k must be >= 1")
        if not 1 <= self.stride <= self.k:
            raise ValueError("stride must be in [1, k]")
        if len(self.tables) != self.n_blocks:
            raise ValueError("one table required per block")
        if any(len(t) != 1 << self.k for t in self.tables):
            raise ValueError(f"tables must have 2^{self.k} entries")

    @property
    def length(self) -> int:
        return self.stride * self.n_blocks + self.k - 1

    def fitness(self, g: Genotype) -> float:
        if g.length != self.length:
            raise ValueError("genotype length mismatch")
        window = (1 << self.k) - 1
        bits = g.bits
        stride = self.stride
        total = 0.0
        # Plain left-to-right accumulation; the optimum solver sums the
        # winning path in the same order, so the target value is hit exactly.
        for i, table in enumerate(self.tables):
            total += table[(bits >> (stride * i)) & window]
        return total


def generate_ankl(
    n_blocks: int, k: int, stride: int, rng: RandomSource
) -> AdjacentNk:
    """Draw the n_blocks lookup tables uniformly from [0, 1), one table per
    block in index order."""
    tables = tuple(
        tuple(rng.random_floats(1 << k).tolist()) for _ in range(n_blocks)
    )
    return AdjacentNk(n_blocks, k, stride, tables, seed=rng.seed)


def ankl_optimum(fn: AdjacentNk) -> tuple[Genotype, float]:
    """Exact global optimum of an adjacent NK-landscape by dynamic
    programming along the chain of overlapping windows.

    The DP state after window i is the ``k - stride`` bits shared with
    window i + 1. Positions beyond the last window are fitness-neutral and
    fixed to 0 in the returned genotype.
    """
    k, stride, n = fn.k, fn.stride, fn.n_blocks
    overlap = k - stride
    # best[state] = (accumulated value, genotype bits chosen so far)
    best: dict[int, tuple[float, int]] = {}
    for v in range(1 << k):
        val = fn.tables[0][v]
        state = v >> stride
        if state not in best or val > best[state][0]:
            best[state] = (val, v)
    for i in range(1, n):
        table = fn.tables[i]
        nxt: dict[int, tuple[float, int]] = {}
        for state, (acc, bits) in best.items():
            for new in range(1 << stride):
                v = state | (new << overlap)
                val = acc + table[v]
                nstate = v >> stride
                nbits = bits | (new << (k + (i - 1) * stride))
                if nstate not in nxt or val > nxt[nstate][0]:
                    nxt[nstate] = (val, nbits)
        best = nxt
    value, bits = max(best.values(), key=lambda t: t[0])
    witness = Genotype(bits, fn.length)
    # Re-evaluate through the standard path so target comparisons are exact.
    return witness, fn.fitness(witness)


@dataclass(frozen=True)
class ProblemInstance:
    """A fitness function paired with its target value, evaluation-time
    model and (when defined) the disjoint position blocks used by
    subfunction crossover."""

    function: object  # anything with .length and .fitness(Genotype) -> float
    target_value: float
    time_model: TimeModel
    sfx_partition: tuple[tuple[int, ...], ...] | None = None
    label: str = ""

    @property
    def length(self) -> int:
        return self.function.length

    def evaluate(self, g: Genotype) -> tuple[float, float]:
        """Return (fitness, evaluation time in simulated seconds)."""
        if g.length != self.length:
            raise ValueError("genotype length mismatch")
        return self.function.fitness(g), self.time_model.eval_time(g)


def dt_partition(n_blocks: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(range(b * k, (b + 1) * k)) for b in range(n_blocks))


def ankl_partition(
    n_blocks: int, k: int, stride: int
) -> tuple[tuple[int, ...], ...]:
    """Disjoint cover for subfunction crossover on overlapping windows:
    one chunk of ``stride`` positions per window start, plus everything
    after the last start as the final chunk."""
    length = stride * n_blocks + k - 1
    chunks = [tuple(range(i * stride, (i + 1) * stride)) for i in range(n_blocks)]
    tail = tuple(range(n_blocks * stride, length))
    if tail:
        chunks.append(tail)
    return tuple(chunks)


def dt_problem(n_blocks: int, k: int, ratio: tuple[float, float]) -> ProblemInstance:
    fn = DeceptiveTrap(n_blocks, k)
    return ProblemInstance(
        function=fn,
        target_value=fn.optimum_value,
        time_model=make_time_model(ratio, fn.optimum),
        sfx_partition=dt_partition(n_blocks, k),
        label=f"dt:l={fn.length},k={k}",
    )


def ankl_problem(
    n_blocks: int, k: int, stride: int, seed: int, ratio: tuple[float, float]
) -> ProblemInstance:
    fn = generate_ankl(n_blocks, k, stride, RandomSource(seed))
    optimum, value = ankl_optimum(fn)
    return ProblemInstance(
        function=fn,
        target_value=value,
        time_model=make_time_model(ratio, optimum),
        sfx_partition=ankl_partition(n_blocks, k, stride),
        label=f"ankl:l={fn.length},k={k},stride={stride},seed={seed}",
    )


def instance_to_json(p: ProblemInstance) -> dict:
    """Serialize an instance so a run can be reproduced bit-exactly."""
    fn = p.function
    doc: dict = {
        "target_value": p.target_value,
        "time_model": {
            "a": p.time_model.a,
            "b": p.time_model.b,
            "optimum": p.time_model.optimum.to01(),
        },
        "sfx_partition": [list(c) for c in p.sfx_partition]
        if p.sfx_partition
        else None,
        "label": p.label,
    }
    if isinstance(fn, DeceptiveTrap):
        doc["kind"] = "dt"
        doc["n_blocks"] = fn.n_blocks
        doc["k"] = fn.k
    elif isinstance(fn, AdjacentNk):
        doc["kind"] = "ankl"
        doc["n_blocks"] = fn.n_blocks
        doc["k"] = fn.k
        doc["stride"] = fn.stride
        doc["seed"] = fn.seed
        doc["tables"] = [list(t) for t in fn.tables]
    else:
        raise ValueError(f"cannot serialize fitness function {type(fn).__name__}")
    return doc


def instance_from_json(
    doc: dict, ratio: tuple[float, float] | None = None
) -> ProblemInstance:
    """Rebuild an instance from its JSON document; ``ratio`` overrides the
    stored time-model endpoints when given."""
    kind = doc["kind"]
    if kind == "dt":
        fn: object = DeceptiveTrap(doc["n_blocks"], doc["k"])
    elif kind == "ankl":
        fn = AdjacentNk(
            doc["n_blocks"],
            doc["k"],
            doc["stride"],
            tuple(tuple(t) for t in doc["tables"]),
            seed=doc.get("seed"),
        )
    else:
        raise ValueError(f"unknown problem kind {kind!r}")
    tm = doc["time_model"]
    optimum = Genotype.from01(tm["optimum"])
    a, b = (tm["a"], tm["b"]) if ratio is None else ratio
    partition = doc.get("sfx_partition")
    return ProblemInstance(
        function=fn,
        target_value=doc["target_value"],
        time_model=make_time_model((a, b), optimum),
        sfx_partition=tuple(tuple(c) for c in partition) if partition else None,
        label=doc.get("label", kind),
    )


def save_instance(p: ProblemInstance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance_to_json(p), indent=2))


def load_instance(
    path: str | Path, ratio: tuple[float, float] | None = None
) -> ProblemInstance:
    return instance_from_json(json.loads(Path(path).read_text()), ratio)
