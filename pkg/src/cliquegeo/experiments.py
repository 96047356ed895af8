"""Trial runner: generate, simulate, verify against oracles, emit tables."""
from __future__ import annotations

import json
import statistics
from dataclasses import dataclass

from .engine import EngineConfig, run_protocol
from .errors import PreconditionError
from .generators import generate, needed_bits
from .geometry import Point
from .log_hull import log_hull_program
from .oracles import hull_oracle, triangulation_validator
from .quick_hull import quick_hull_program
from .triangulation import triangulation_program

ALGORITHMS = ("quickhull", "loghull", "triangulate")

CSV_HEADER = "algo,n,N,seed,h,rounds,primitives,max_outdeg,max_bits,verified"


@dataclass(frozen=True)
class TrialOutcome:
    """One run's row of metrics plus the data needed to audit it."""

    algo: str
    n: int
    big_n: int
    seed: int
    h: int
    rounds: int
    primitives: int
    max_outdeg: int
    max_bits: int
    verified: bool
    violations: tuple[str, ...] = ()
    trace: tuple[tuple[int, int, int, int, str], ...] | None = None

    def csv_row(self) -> str:
        return (
            f"{self.algo},{self.n},{self.big_n},{self.seed},{self.h},"
            f"{self.rounds},{self.primitives},{self.max_outdeg},"
            f"{self.max_bits},{str(self.verified).lower()}"
        )

    def as_dict(self) -> dict:
        out = {
            "algo": self.algo,
            "n": self.n,
            "N": self.big_n,
            "seed": self.seed,
            "h": self.h,
            "rounds": self.rounds,
            "primitives": self.primitives,
            "max_outdeg": self.max_outdeg,
            "max_bits": self.max_bits,
            "verified": self.verified,
        }
        if self.trace is not None:
            out["trace"] = [list(row) for row in self.trace]
        return out


def _config_for(algo: str, n: int, batches: list[list[Point]], cost: int) -> EngineConfig:
    bits = max(8, (n * n - 1).bit_length() + 2, needed_bits(batches))
    rounds_cap = 0
    if algo == "quickhull":
        # The stack walk revisits every hull vertex a constant number of
        # times, so the ceiling must scale with the largest possible h.
        rounds_cap = max(64 * n, 64 + 12 * n * n)
    return EngineConfig(
        n=n,
        coord_bits=bits,
        primitive_round_cost=cost,
        max_rounds=rounds_cap,
    )


def run_trial(
    algo: str,
    n: int,
    gen: str,
    seed: int,
    primitive_cost: int = 1,
    collect_trace: bool = False,
) -> TrialOutcome:
    """Generate one instance, run the protocol, verify, and report metrics."""
    if algo not in ALGORITHMS:
        raise PreconditionError(f"unknown algorithm {algo!r}")
    batches = generate(gen, n, seed, general_position=(algo == "triangulate"))
    points = [p for batch in batches for p in batch]
    config = _config_for(algo, n, batches, primitive_cost)
    payloads = {i + 1: batches[i] for i in range(n)}
    programs = {
        "quickhull": quick_hull_program,
        "loghull": log_hull_program,
        "triangulate": triangulation_program,
    }
    outputs, metrics = run_protocol(
        config, programs[algo], payloads=payloads, collect_trace=collect_trace
    )

    if algo == "triangulate":
        hull = hull_oracle(points)
        h = len(hull)
        tris = [t for i in sorted(outputs) for t in outputs[i][0]]
        totals = {outputs[i][1] for i in outputs}
        report = triangulation_validator(points, tris)
        expected = max(0, 2 * len(points) - h - 2) if len(points) >= 3 else 0
        verified = report.passed and totals == {len(tris)} and len(tris) == expected
    else:
        hull = [p for i in sorted(outputs) for p in outputs[i][0]]
        h_values = {outputs[i][1] for i in outputs}
        h = len(hull)
        verified = hull == list(hull_oracle(points)) and h_values == {h}

    return TrialOutcome(
        algo=algo,
        n=n,
        big_n=len(points),
        seed=seed,
        h=h,
        rounds=metrics.rounds_total,
        primitives=sum(metrics.primitive_invocations.values()),
        max_outdeg=metrics.max_out_degree,
        max_bits=metrics.max_message_bits,
        verified=verified,
        violations=tuple(metrics.violations),
        trace=tuple(metrics.trace) if metrics.trace is not None else None,
    )


def run_experiment(
    algo: str,
    n: int,
    gen: str,
    seed: int,
    trials: int = 1,
    primitive_cost: int = 1,
    collect_trace: bool = False,
) -> list[TrialOutcome]:
    """Run `trials` independent instances seeded seed, seed+1, ..."""
    if trials < 1:
        raise PreconditionError(f"trials must be positive, got {trials}")
    return [
        run_trial(algo, n, gen, seed + k, primitive_cost, collect_trace)
        for k in range(trials)
    ]


def to_csv(rows: list[TrialOutcome]) -> str:
    return "\n".join([CSV_HEADER] + [r.csv_row() for r in rows]) + "\n"


def aggregates(rows: list[TrialOutcome]) -> dict:
    rounds = [r.rounds for r in rows]
    return {
        "rounds_min": min(rounds),
        "rounds_median": statistics.median(rounds),
        "rounds_max": max(rounds),
        "all_verified": all(r.verified for r in rows),
    }


def to_json(rows: list[TrialOutcome]) -> str:
    doc = {"trials": [r.as_dict() for r in rows], "aggregates": aggregates(rows)}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def trace_csv(rows: list[TrialOutcome]) -> str:
    """All trials' message traces, one `round,src,dst,bits,tag` line each."""
    lines = ["round,src,dst,bits,tag"]
    for r in rows:
        for rnd, src, dst, bits, tag in r.trace or ():
            lines.append(f"{rnd},{src},{dst},{bits},{tag}")
    return "\n".join(lines) + "\n"
