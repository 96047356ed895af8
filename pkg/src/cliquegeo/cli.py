"""Command-line client for the experiment service.

By default the request is served in-process through the ASGI app; --server
points the same client at a remote deployment instead.

Exit codes: 0 success, 1 verification failure under --verify, 2 bad usage
or precondition, 3 simulation integrity violation.
"""
from __future__ import annotations

import argparse
import asyncio
import sys
from pathlib import Path

import httpx

from .experiments import CSV_HEADER


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cliquegeo",
        description="Run distributed hull/triangulation experiments.",
    )
    p.add_argument("--algo", required=True, choices=["quickhull", "loghull", "triangulate"])
    p.add_argument("--n", required=True, type=int, help="clique size")
    p.add_argument(
        "--gen",
        default="uniform",
        help="uniform | convex-circle | parabola | grid-jitter | file:PATH",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument(
        "--verify",
        action="store_true",
        help="exit 1 unless every trial matches its oracle",
    )
    p.add_argument("--out", default=None, help="write the table here instead of stdout")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--trace", default=None, help="write a per-message trace CSV here")
    p.add_argument("--primitive-cost", type=int, default=1)
    p.add_argument("--server", default=None, help="base URL of a running service")
    return p


async def _post(payload: dict, server: str | None) -> httpx.Response:
    if server:
        async with httpx.AsyncClient(base_url=server, timeout=600.0) as client:
            return await client.post("/experiments", json=payload)
    from .service.app import app

    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(
        transport=transport, base_url="http://cliquegeo.local", timeout=None
    ) as client:
        return await client.post("/experiments", json=payload)


def _csv_table(doc: dict) -> str:
    lines = [CSV_HEADER]
    for t in doc["trials"]:
        lines.append(
            f'{t["algo"]},{t["n"]},{t["N"]},{t["seed"]},{t["h"]},{t["rounds"]},'
            f'{t["primitives"]},{t["max_outdeg"]},{t["max_bits"]},'
            f'{str(t["verified"]).lower()}'
        )
    return "\n".join(lines) + "\n"


def _json_table(doc: dict) -> str:
    import json

    trials = [{k: v for k, v in t.items() if k != "trace"} for t in doc["trials"]]
    out = {
        "trials": trials,
        "aggregates": {
            "rounds_min": doc["rounds_min"],
            "rounds_median": doc["rounds_median"],
            "rounds_max": doc["rounds_max"],
            "all_verified": doc["all_verified"],
        },
    }
    return json.dumps(out, sort_keys=True, indent=2) + "\n"


def _trace_table(doc: dict) -> str:
    lines = ["round,src,dst,bits,tag"]
    for t in doc["trials"]:
        for rnd, src, dst, bits, tag in t.get("trace") or ():
            lines.append(f"{rnd},{src},{dst},{bits},{tag}")
    return "\n".join(lines) + "\n"


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    payload = {
        "algo": args.algo,
        "n": args.n,
        "gen": args.gen,
        "seed": args.seed,
        "trials": args.trials,
        "verify": args.verify,
        "primitive_cost": args.primitive_cost,
        "trace": args.trace is not None,
    }
    try:
        resp = asyncio.run(_post(payload, args.server))
    except httpx.HTTPError as exc:
        print(f"cliquegeo: cannot reach service: {exc}", file=sys.stderr)
        return 2
    if resp.status_code == 400 or resp.status_code == 422:
        print(f"cliquegeo: {resp.json().get('detail')}", file=sys.stderr)
        return 2
    if resp.status_code >= 500:
        print(f"cliquegeo: {resp.json().get('detail')}", file=sys.stderr)
        return 3
    doc = resp.json()

    table = _csv_table(doc) if args.format == "csv" else _json_table(doc)
    if args.out:
        Path(args.out).write_text(table)
    else:
        sys.stdout.write(table)
    if args.trace:
        Path(args.trace).write_text(_trace_table(doc))
    if args.verify and not doc["all_verified"]:
        print("cliquegeo: oracle verification failed", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
