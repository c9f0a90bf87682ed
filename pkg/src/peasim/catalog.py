"""Config-string parsing: algorithm ids, problem descriptors and
evaluation-time ratios, with exhaustive validation messages."""

from __future__ import annotations

from pathlib import Path

from .ecga import Ecga
from .engine import Algorithm
from .ga import Crossover, SimpleGa
from .gomea import Gomea
from .problems import (
    ProblemInstance,
    ankl_problem,
    dt_problem,
    load_instance,
)

__all__ = [
    "ConfigError",
    "algorithm_ids",
    "make_algorithm",
    "parse_ratio",
    "build_problem",
    "PAPER_RATIOS",
]

# The seven evaluation-time ratios, from a cheaper to a more expensive
# optimum.
PAPER_RATIOS = ["100:1", "10:1", "2:1", "1:1", "1:2", "1:10", "1:100"]


class ConfigError(ValueError):
    """A malformed or unknown configuration string."""


def algorithm_ids() -> list[str]:
    ids = [
        f"ga.{mode}.{sel}.{cx}"
        for mode in ("sync", "async")
        for sel in ("ss", "gen")
        for cx in ("ux", "tpx", "sfx")
    ]
    ids += [f"ecga.{mode}.{sel}" for mode in ("sync", "async") for sel in ("ss", "gen")]
    ids += ["gomea.sync", "gomea.ae", "gomea.ai"]
    return ids


def _unknown(kind: str, value: str, options: list[str]) -> ConfigError:
    return ConfigError(
        f"unknown {kind} {value!r}; valid options: {', '.join(options)}"
    )


def make_algorithm(algo_id: str, problem: ProblemInstance) -> Algorithm:
    parts = algo_id.split(".")
    valid = algorithm_ids()
    if algo_id not in valid:
        raise _unknown("algorithm", algo_id, valid)
    if parts[0] == "ga":
        _, mode, sel, cx = parts
        crossover = Crossover(cx, problem.length, problem.sfx_partition)
        return SimpleGa(mode, sel, crossover)
    if parts[0] == "ecga":
        _, mode, sel = parts
        return Ecga(mode, sel)
    return Gomea(parts[1])


def parse_ratio(text: str) -> tuple[float, float]:
    try:
        a_str, b_str = text.split(":")
        a, b = float(a_str), float(b_str)
    except ValueError:
        raise ConfigError(
            f"malformed ratio {text!r}; expected 'a:b' with positive numbers"
        ) from None
    if a <= 0 or b <= 0:
        raise ConfigError(f"ratio components must be positive, got {text!r}")
    return a, b


def expand_ratios(text: str) -> list[str]:
    """Expand the 'paper' shorthand into the seven standard ratios."""
    if text == "paper":
        return list(PAPER_RATIOS)
    return [r.strip() for r in text.split(",") if r.strip()]


def _parse_kv(body: str, spec: str) -> dict[str, int]:
    params: dict[str, int] = {}
    for item in body.split(","):
        if "=" not in item:
            raise ConfigError(f"malformed problem descriptor {spec!r}")
        key, value = item.split("=", 1)
        try:
            params[key.strip()] = int(value)
        except ValueError:
            raise ConfigError(
                f"problem parameter {key!r} must be an integer in {spec!r}"
            ) from None
    return params


def build_problem(spec: str, ratio: tuple[float, float]) -> ProblemInstance:
    """Build a problem from a descriptor string.

    Accepted forms: ``dt:l=50,k=5``, ``ankl:l=40,k=5,stride=2,seed=0``, or
    a path to a serialized instance JSON file.
    """
    if spec.startswith("dt:"):
        params = _parse_kv(spec[3:], spec)
        missing = {"l", "k"} - set(params)
        if missing:
            raise ConfigError(f"dt problem needs l and k, missing {sorted(missing)}")
        length, k = params["l"], params["k"]
        if length % k:
            raise ConfigError(f"dt length {length} is not a multiple of k={k}")
        return dt_problem(length // k, k, ratio)
    if spec.startswith("ankl:"):
        params = _parse_kv(spec[5:], spec)
        missing = {"l", "k", "stride", "seed"} - set(params)
        if missing:
            raise ConfigError(
                f"ankl problem needs l, k, stride and seed, missing {sorted(missing)}"
            )
        length, k, stride, seed = (
            params["l"],
            params["k"],
            params["stride"],
            params["seed"],
        )
        if (length - k + 1) % stride or length < k:
            raise ConfigError(
                f"ankl length {length} incompatible with k={k}, stride={stride}; "
                "need l = stride*n + k - 1 for a whole number of blocks"
            )
        return ankl_problem((length - k + 1) // stride, k, stride, seed, ratio)
    if Path(spec).suffix == ".json" and Path(spec).exists():
        return load_instance(spec, ratio)
    raise ConfigError(
        f"unknown problem {spec!r}; expected 'dt:l=..,k=..', "
        "'ankl:l=..,k=..,stride=..,seed=..' or a path to an instance .json"
    )
