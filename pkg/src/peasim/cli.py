"""Command-line front door: a thin client for the HTTP service.

Without ``--server`` the commands talk to an in-process instance of the
service, so no running server is needed and outputs stay byte-identical
for identical argv and seed. Exit codes: 0 success, 1 configuration
error, 2 FAILED search outcome.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

from .catalog import expand_ratios


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peasim",
        description="Simulated parallel evolutionary algorithms under "
        "genotype-dependent evaluation times",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running service; default runs in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, pop_search: bool):
        p.add_argument("--algo", required=True, help="algorithm id, e.g. gomea.ai")
        p.add_argument(
            "--problem",
            required=True,
            help="dt:l=50,k=5 | ankl:l=40,k=5,stride=2,seed=0 | instance .json path",
        )
        p.add_argument("--ratio", default="1:1", help="evaluation-time ratio a:b")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--processors", type=int, default=None)
        p.add_argument("--max-sim-time", type=float, default=None)
        p.add_argument("--max-evaluations", type=int, default=2_000_000)
        p.add_argument("--stagnation", action="store_true")
        if pop_search:
            p.add_argument("--base-pop", type=int, default=8)
            p.add_argument("--max-pop", type=int, default=4096)

    p_run = sub.add_parser("run", help="one simulation at a fixed population size")
    common(p_run, pop_search=False)
    p_run.add_argument("--pop", type=int, required=True)
    p_run.add_argument("--event-log", default=None, help="write event CSV here")

    p_bisect = sub.add_parser("bisect", help="minimal population size by bisection")
    common(p_bisect, pop_search=True)

    p_golden = sub.add_parser(
        "goldensection", help="population size minimizing simulated wall time"
    )
    common(p_golden, pop_search=True)

    p_matrix = sub.add_parser("matrix", help="full experiment grid")
    p_matrix.add_argument("--algos", required=True, help="comma-separated algorithm ids")
    p_matrix.add_argument("--problem", required=True)
    p_matrix.add_argument(
        "--ratios", default="1:1", help="comma-separated ratios or 'paper'"
    )
    p_matrix.add_argument("--seeds", default="0", help="comma list or start:stop range")
    p_matrix.add_argument("--processors", type=int, default=None)
    p_matrix.add_argument("--base-pop", type=int, default=8)
    p_matrix.add_argument("--max-pop", type=int, default=4096)
    p_matrix.add_argument("--max-evaluations", type=int, default=2_000_000)
    p_matrix.add_argument("--stagnation", action="store_true")
    p_matrix.add_argument("--jobs", type=int, default=1)
    p_matrix.add_argument("--out-csv", default=None)
    p_matrix.add_argument("--out-json", default=None)

    p_gen = sub.add_parser("gen-problem", help="generate and serialize an instance")
    p_gen.add_argument("--length", type=int, required=True)
    p_gen.add_argument("--k", type=int, default=5)
    p_gen.add_argument("--stride", type=int, default=2)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True)

    p_serve = sub.add_parser("serve", help="launch the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    return parser


def _parse_seeds(text: str) -> list[int]:
    if ":" in text:
        start, stop = text.split(":")
        return list(range(int(start), int(stop)))
    return [int(s) for s in text.split(",") if s.strip()]


class _Client:
    """httpx against a remote server, or the in-process service."""

    def __init__(self, server: str | None):
        if server:
            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app)

    def post(self, path: str, payload: dict) -> httpx.Response:
        return self._client.post(path, json=payload)


def _post(client: _Client, path: str, payload: dict) -> dict:
    response = client.post(path, payload)
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        print(f"error: {detail}", file=sys.stderr)
        raise SystemExit(1)
    return response.json()


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    client = _Client(args.server)

    if args.command == "run":
        payload = {
            "algorithm": args.algo,
            "problem": args.problem,
            "ratio": args.ratio,
            "pop_size": args.pop,
            "seed": args.seed,
            "processors": args.processors,
            "max_sim_time": args.max_sim_time,
            "max_evaluations": args.max_evaluations,
            "stagnation": args.stagnation,
            "event_log": args.event_log is not None,
        }
        data = _post(client, "/run", payload)
        if args.event_log:
            Path(args.event_log).write_text(data["event_log_csv"])
        print(
            f"algorithm={args.algo} problem={args.problem} ratio={args.ratio} "
            f"seed={args.seed} pop={args.pop} success={int(data['success'])} "
            f"reason={data['reason']} time={data['simulated_time']!r} "
            f"evaluations={data['evaluations_completed']} "
            f"best={data['best_fitness']!r} target={data['target_value']!r}"
        )
        return 0

    if args.command in ("bisect", "goldensection"):
        payload = {
            "algorithm": args.algo,
            "problem": args.problem,
            "ratio": args.ratio,
            "seed": args.seed,
            "processors": args.processors,
            "base_pop": args.base_pop,
            "max_pop": args.max_pop,
            "max_sim_time": args.max_sim_time,
            "max_evaluations": args.max_evaluations,
            "stagnation": args.stagnation,
        }
        data = _post(client, f"/{args.command}", payload)
        if args.command == "bisect":
            pop = "FAILED" if data["failed"] else data["minimal_pop"]
            probes = ",".join(
                f"{p['pop_size']}:{'ok' if p['success'] else 'fail'}"
                for p in data["trace"]
            )
            print(
                f"algorithm={args.algo} problem={args.problem} ratio={args.ratio} "
                f"seed={args.seed} minimal_pop={pop} probes={probes}"
            )
        else:
            pop = "FAILED" if data["failed"] else data["best_pop"]
            time = "inf" if data["failed"] else repr(data["best_time"])
            print(
                f"algorithm={args.algo} problem={args.problem} ratio={args.ratio} "
                f"seed={args.seed} best_pop={pop} best_time={time} "
                f"probes={len(data['probes'])}"
            )
        return 2 if data["failed"] else 0

    if args.command == "matrix":
        payload = {
            "algorithms": [a.strip() for a in args.algos.split(",") if a.strip()],
            "problem": args.problem,
            "ratios": expand_ratios(args.ratios),
            "seeds": _parse_seeds(args.seeds),
            "processors": args.processors,
            "base_pop": args.base_pop,
            "max_pop": args.max_pop,
            "max_evaluations": args.max_evaluations,
            "stagnation": args.stagnation,
            "jobs": args.jobs,
        }
        data = _post(client, "/matrix", payload)
        if args.out_csv:
            Path(args.out_csv).write_text(data["csv"])
        if args.out_json:
            Path(args.out_json).write_text(
                json.dumps(
                    {"aggregates": data["aggregates"], "tests": data["tests"]},
                    indent=2,
                    sort_keys=True,
                )
            )
        if not args.out_csv:
            print(data["csv"], end="")
        return 0

    if args.command == "gen-problem":
        payload = {
            "length": args.length,
            "k": args.k,
            "stride": args.stride,
            "seed": args.seed,
        }
        data = _post(client, "/problems/generate", payload)
        Path(args.out).write_text(json.dumps(data["instance"], indent=2))
        print(
            f"wrote {args.out} target={data['target_value']!r} "
            f"optimum={data['optimum']}"
        )
        return 0

    raise SystemExit(1)  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
