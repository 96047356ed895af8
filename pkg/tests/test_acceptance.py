"""Acceptance gate: one test per criterion, each printing a verdict line.

Criteria 1, 2, 3, and 5 accumulate their run metrics so criterion 6 can
audit congestion compliance across every protocol execution in this module.
"""
from __future__ import annotations

import random
import time

from cliquegeo.experiments import run_experiment, run_trial, to_csv
from cliquegeo.geometry import local_upper_hull, upper_scan
from cliquegeo.hull_common import BatchBounds, column_tops, negate
from cliquegeo.log_hull import bridge_between, prune_to_chain
from cliquegeo.oracles import bridge_oracle, hull_oracle
from conftest import random_chain, random_points

_ALL_RUNS = []


def _run(algo: str, n: int, gen: str, seed: int):
    outcome = run_trial(algo, n, gen, seed)
    _ALL_RUNS.append(outcome)
    return outcome


def _verdict(capsys, num: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\ncriterion {num}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num}: {detail}"


def _cl2(x: int) -> int:
    return (x - 1).bit_length() if x > 1 else 0


def test_criterion_1_hull_exactness(capsys):
    t0 = time.perf_counter()
    bad = []
    for n in (4, 8, 16, 32):
        for algo in ("quickhull", "loghull"):
            for seed in range(50):
                if not _run(algo, n, "uniform", seed).verified:
                    bad.append((algo, n, seed))
    elapsed = time.perf_counter() - t0
    detail = (
        f"400 runs match the oracle exactly, {elapsed:.1f}s"
        if not bad
        else f"mismatches: {bad[:5]}"
    )
    _verdict(capsys, 1, not bad, detail)


def test_criterion_2_quickhull_round_law(capsys):
    # first calibration at n=4 measured rounds = 5*h - 2; frozen as
    # rounds <= C_q*h + C_0 with C_q = 5, C_0 = 0
    worst = {}
    ok = True
    for n in (4, 8, 16):
        w = 0
        for seed in (0, 1):
            out = _run("quickhull", n, "convex-circle", seed)
            ok = ok and out.verified and out.h == n * n
            ok = ok and out.rounds <= 5 * out.h
            w = max(w, out.rounds)
        worst[n] = w
    ratio = worst[16] / worst[8]
    ok = ok and 3.5 <= ratio <= 4.5
    _verdict(
        capsys, 2, ok, f"rounds {worst}, ratio 16/8 = {ratio:.2f} in [3.5, 4.5]"
    )


def test_criterion_3_loghull_round_law(capsys):
    worst = {}
    ok = True
    for gen in ("uniform", "convex-circle"):
        for n in (8, 16, 32, 64):
            w = 0
            for seed in range(3):
                out = _run("loghull", n, gen, seed)
                ok = ok and out.verified
                w = max(w, out.rounds)
            worst[(gen, n)] = w
    # calibrated at n=8 with zero offset
    c_log = max(worst[("uniform", 8)], worst[("convex-circle", 8)]) / _cl2(8)
    for gen in ("uniform", "convex-circle"):
        for n in (8, 16, 32, 64):
            ok = ok and worst[(gen, n)] <= c_log * _cl2(n)
    flat = all(
        worst[("convex-circle", n)] <= 1.25 * worst[("uniform", n)]
        for n in (8, 16, 32, 64)
    )
    ok = ok and flat
    uni = [worst[("uniform", n)] for n in (8, 16, 32, 64)]
    _verdict(
        capsys,
        3,
        ok,
        f"C={c_log:.2f} per log step, uniform worsts {uni}, h-independent={flat}",
    )


def test_criterion_4_bridge_oracle_equivalence(capsys):
    rng = random.Random(97)
    t0 = time.perf_counter()
    checked = 0
    worst_msgs = 0
    failure = ""
    for k in range(10_000):
        if k % 8 == 0:
            a, b = rng.randint(1, 64), rng.randint(1, 64)
        else:
            a, b = rng.randint(1, 12), rng.randint(1, 12)
        left = random_chain(rng, a, 0, 95)
        right = random_chain(rng, b, 105, 200)
        got, msgs = bridge_between(left, right)
        want = bridge_oracle(local_upper_hull(left), local_upper_hull(right))
        if got != want:
            failure = f"pair {k}: sizes ({a},{b}) returned {got}, oracle {want}"
            break
        if msgs > 4 * (_cl2(a) + _cl2(b)) + 8:
            failure = f"pair {k}: sizes ({a},{b}) used {msgs} messages"
            break
        worst_msgs = max(worst_msgs, msgs)
        checked += 1
    ok = checked == 10_000
    detail = failure or (
        f"{checked} pairs exact, max messages {worst_msgs}, "
        f"{time.perf_counter() - t0:.1f}s"
    )
    _verdict(capsys, 4, ok, detail)


def test_criterion_5_triangulation_validity(capsys):
    worst = {}
    ok = True
    for n in (4, 8, 16):
        w = 0
        for seed in range(25):
            out = _run("triangulate", n, "uniform", seed)
            ok = ok and out.verified
            w = max(w, out.rounds)
        worst[n] = w
    # calibrated at n=4 with zero offset
    c_tri = worst[4] / _cl2(4) ** 2
    ok = ok and worst[8] <= c_tri * _cl2(8) ** 2
    ok = ok and worst[16] <= c_tri * _cl2(16) ** 2
    ratio = worst[16] / worst[4]
    ok = ok and ratio <= 4.5
    _verdict(
        capsys, 5, ok, f"worst rounds {worst}, ratio 16/4 = {ratio:.2f} <= 4.5"
    )


def test_criterion_6_congestion_compliance(capsys):
    assert _ALL_RUNS, "criteria 1-5 populate the run log first"
    offenders = [
        (o.algo, o.n, o.seed, o.violations, o.max_outdeg)
        for o in _ALL_RUNS
        if o.violations or o.max_outdeg > o.n - 1
    ]
    detail = (
        f"{len(_ALL_RUNS)} runs, zero violations, out-degree within n-1"
        if not offenders
        else f"offenders: {offenders[:5]}"
    )
    _verdict(capsys, 6, not offenders, detail)


def test_criterion_7_determinism(capsys):
    ok = True
    for algo, n, gen in (
        ("quickhull", 4, "convex-circle"),
        ("loghull", 8, "uniform"),
        ("triangulate", 4, "uniform"),
    ):
        first = to_csv(run_experiment(algo, n, gen, 0, trials=3))
        second = to_csv(run_experiment(algo, n, gen, 0, trials=3))
        ok = ok and first == second
    _verdict(capsys, 7, ok, "repeat runs emit byte-identical CSV")


def _upper_side_survivors(batches, bounds):
    chains = [upper_scan(column_tops(b, k, bounds)) for k, b in enumerate(batches)]
    incident = [[] for _ in batches]
    for k in range(len(batches)):
        for m in range(k + 1, len(batches)):
            if chains[k] and chains[m]:
                br = bridge_oracle(
                    local_upper_hull(chains[k]), local_upper_hull(chains[m])
                )
                incident[k].append(br)
                incident[m].append(br)
    return chains, [
        prune_to_chain(chains[k], incident[k]) for k in range(len(batches))
    ]


def test_criterion_8_prune_iff(capsys):
    rng = random.Random(131)
    ok = True
    detail = "1000 instances: pruned set == local-hull vertices off the hull"
    for idx in range(1000):
        pts = random_points(rng, 16)
        batches = [pts[4 * k : 4 * k + 4] for k in range(4)]
        bounds = BatchBounds(
            tuple(b[0] for b in batches), tuple(b[-1] for b in batches)
        )
        up_ws, up_sv = _upper_side_survivors(batches, bounds)
        # the reflected instance turns the lower-side question into this
        # same upper-side harness
        neg = sorted(negate(p) for p in pts)
        neg_batches = [neg[4 * k : 4 * k + 4] for k in range(4)]
        neg_bounds = BatchBounds(
            tuple(b[0] for b in neg_batches), tuple(b[-1] for b in neg_batches)
        )
        low_ws_neg, low_sv_neg = _upper_side_survivors(neg_batches, neg_bounds)
        hull_set = set(hull_oracle(pts))
        for k in range(4):
            workset = set(up_ws[k]) | {negate(q) for q in low_ws_neg[3 - k]}
            survivors = set(up_sv[k]) | {negate(q) for q in low_sv_neg[3 - k]}
            if workset - survivors != workset - hull_set:
                ok = False
                detail = f"instance {idx} node {k + 1}: prune/hull mismatch"
                break
        if not ok:
            break
    _verdict(capsys, 8, ok, detail)
