"""Population-size searches: doubling + bisection for the minimally
required size, and a bracketing third-point search for the size that
minimizes wall time. Both probe the even-integer lattice."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

__all__ = [
    "ProbeResult",
    "BisectionResult",
    "bisect_min_popsize",
    "GoldenResult",
    "golden_section_min",
]


@dataclass(frozen=True)
class ProbeResult:
    pop_size: int
    success: bool
    simulated_time: float
    evaluations: int
    reason: str


@dataclass
class BisectionResult:
    seed: int
    minimal_pop: int | None  # None means the search FAILED
    trace: list[ProbeResult] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return self.minimal_pop is None

    def minimal_probe(self) -> ProbeResult | None:
        for probe in self.trace:
            if probe.success and probe.pop_size == self.minimal_pop:
                return probe
        return None


def _even(n: int) -> int:
    return n - (n % 2)


def bisect_min_popsize(
    run: Callable[[int], ProbeResult],
    seed: int,
    base_pop: int = 8,
    max_pop: int = 4096,
) -> BisectionResult:
    """Smallest successful population size on the even lattice.

    Doubles from ``base_pop`` until a run succeeds, then bisects between
    the largest failure and the smallest success with probes rounded to
    even integers. FAILED when doubling exhausts ``max_pop``.
    """
    if base_pop < 4 or base_pop % 2:
        raise ValueError("base population size must be even and >= 4")
    result = BisectionResult(seed=seed, minimal_pop=None)
    pop = base_pop
    lo = None  # largest failing size
    hi = None  # smallest succeeding size
    while pop <= max_pop:
        probe = run(pop)
        result.trace.append(probe)
        if probe.success:
            hi = pop
            break
        lo = pop
        pop *= 2
    if hi is None:
        return result
    if lo is not None:
        while True:
            mid = _even((lo + hi) // 2)
            if mid <= lo or mid >= hi:
                break
            probe = run(mid)
            result.trace.append(probe)
            if probe.success:
                hi = mid
            else:
                lo = mid
    result.minimal_pop = hi
    return result


@dataclass
class GoldenResult:
    seed: int
    best_pop: int | None
    best_time: float
    probes: dict[int, float] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.best_pop is None


def golden_section_min(
    measure: Callable[[int], float],
    seed: int,
    base_pop: int = 8,
    max_pop: int = 4096,
) -> GoldenResult:
    """Population size minimizing a (roughly unimodal) time function on
    the even lattice; unsolved sizes measure as infinity.

    Doubles from ``base_pop`` to find a finite-time size, keeps doubling
    while time still falls, then repeatedly probes the longer segment of
    the bracketing triplet at 1/3 or 2/3 of the full range. The returned
    size carries the smallest time over everything probed.
    """
    if base_pop < 4 or base_pop % 2:
        raise ValueError("base population size must be even and >= 4")
    result = GoldenResult(seed=seed, best_pop=None, best_time=math.inf)
    times: dict[int, float] = {}

    def probe(pop: int) -> float:
        if pop not in times:
            times[pop] = measure(pop)
        return times[pop]

    # Find a solving size.
    p1 = base_pop
    while p1 <= max_pop and not math.isfinite(probe(p1)):
        p1 *= 2
    if p1 > max_pop:
        result.probes = times
        return result
    # Double until time stops improving, bracketing the minimum.
    while True:
        p2 = 2 * p1
        if p2 > max_pop:
            p0, p2 = max(p1 // 2, 4), p1  # degenerate bracket at the cap
            probe(p0)
            p1 = p2 if probe(p2) <= probe(p0) else p0
            break
        if probe(p2) > probe(p1):
            p0 = max(p1 // 2, 4)
            probe(p0)
            break
        p1 = p2

    while True:
        unevaluated = [
            p for p in range(p0 + 2, p2, 2) if _even(p) == p and p not in times
        ]
        if not unevaluated:
            break
        left, right = p1 - p0, p2 - p1
        third = (p2 - p0) / 3.0
        ideal = p0 + third if left >= right else p0 + 2.0 * third
        p3 = min(unevaluated, key=lambda p: (abs(p - ideal), p))
        t3 = probe(p3)
        if t3 > probe(p1):
            if p3 > p1:
                p2 = p3
            else:
                p0 = p3
        else:
            if p3 > p1:
                p0, p1 = p1, p3
            else:
                p2, p1 = p1, p3

    finite = {p: t for p, t in times.items() if math.isfinite(t)}
    if finite:
        best_pop = min(finite, key=lambda p: (finite[p], p))
        result.best_pop = best_pop
        result.best_time = finite[best_pop]
    result.probes = times
    return result
