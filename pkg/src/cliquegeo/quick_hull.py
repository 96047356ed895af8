"""Output-sensitive distributed hull by repeated farthest-point splitting.

The working chord and a stack of pending chords are mirrored at every node:
each stack entry additionally lives at one designated holder so the top can
be rebroadcast after a pop.  One split iteration costs 2 rounds (candidate
collection, verdict broadcast) and one edge confirmation costs up to 3, so
the whole run is linear in the hull size.
"""
from __future__ import annotations

from typing import Callable, Iterator, Sequence

from .engine import NodeCtx
from .errors import DuplicatePoint, ProtocolError
from .geometry import LEFT, Point, lower_scan, orientation, upper_scan
from .hull_common import (
    far_point_key,
    finish_hull,
    gather_bounds,
    negate,
    split_upper_lower,
)
from .primitives import sort_points


def chord_candidates(seq: Sequence[Point], p: Point, r: Point) -> list[Point]:
    """Points strictly above the chord and strictly between its endpoints."""
    return [s for s in seq if p < s < r and orientation(p, r, s) == LEFT]


def quick_half(
    ctx: NodeCtx,
    seq: list[Point],
    lo_pt: Point,
    hi_pt: Point,
    holder: Callable[[Point], int],
    mine: set[Point],
) -> Iterator:
    """Mark the hull chain above the chord (lo_pt, hi_pt); returns my marks.

    All nodes walk the shared iteration loop in lockstep; candidate sets of
    activated chords are asserted to shrink monotonically, which pins the
    recursion to the farthest-point splitting it mirrors.
    """
    marks: set[Point] = set()
    active = (lo_pt, hi_pt)
    size = 0
    held_entries: dict[int, tuple[Point, Point]] = {}
    snapshots: dict[int, set[Point]] = {}
    parent_pool: set[Point] | None = None

    while True:
        p, r = active
        cands = chord_candidates(seq, p, r)
        if parent_pool is not None and not set(cands) <= parent_pool:
            raise ProtocolError("candidate set grew across a chord split")
        master = holder(p)
        best = max(cands, key=far_point_key(p, r)) if cands else None
        if ctx.node != master and best is not None:
            ctx.send(master, "qh-cand", best)
        inbox = yield

        if ctx.node == master:
            pool = [m.fields[0] for m in inbox if m.tag == "qh-cand"]
            if best is not None:
                pool.append(best)
            if pool:
                q = max(pool, key=far_point_key(p, r))
                for dst in range(1, ctx.n + 1):
                    if dst != master:
                        ctx.send(dst, "qh-far", q)
                verdict: tuple = ("far", q)
            else:
                for dst in range(1, ctx.n + 1):
                    if dst != master:
                        ctx.send(dst, "qh-pop")
                verdict = ("pop",)
            yield
        else:
            inbox = yield
            verdict = ("",)
            for m in inbox:
                if m.tag == "qh-far":
                    verdict = ("far", m.fields[0])
                    break
                if m.tag == "qh-pop":
                    verdict = ("pop",)
                    break
            if verdict == ("",):
                raise ProtocolError(f"node {ctx.node} missed the chord verdict")

        if verdict[0] == "far":
            q = verdict[1]
            size += 1
            if (size - 1) // ctx.n + 1 == ctx.node:
                held_entries[size] = (q, r)
            parent_pool = set(cands) - {q}
            snapshots[size] = parent_pool
            active = (p, q)
            continue

        if p in mine:
            marks.add(p)
        if r in mine:
            marks.add(r)
        if size == 0:
            return marks
        top_holder = (size - 1) // ctx.n + 1
        if ctx.node == top_holder:
            a, b = held_entries.pop(size)
            for dst in range(1, ctx.n + 1):
                if dst != ctx.node:
                    ctx.send(dst, "qh-top", a, b)
            yield
        else:
            inbox = yield
            a = b = None
            for m in inbox:
                if m.tag == "qh-top":
                    a, b = m.fields
                    break
            if a is None:
                raise ProtocolError(f"node {ctx.node} missed the popped chord")
        parent_pool = snapshots.pop(size)
        size -= 1
        active = (a, b)


def quick_hull_program(ctx: NodeCtx, batch: list[Point]) -> Iterator:
    """Node program: sort, split against the extreme chord, mark both halves
    by farthest-point splitting, compact."""
    members = range(1, ctx.n + 1)
    if ctx.n == 1:
        srt = sorted(batch)
        for k in range(1, len(srt)):
            if srt[k] == srt[k - 1]:
                raise DuplicatePoint(f"repeated point {srt[k]}")
        result = yield from finish_hull(
            ctx, upper_scan(srt), lower_scan(srt), members
        )
        return result

    srt = yield from sort_points(ctx, batch)
    bounds = yield from gather_bounds(ctx, srt, members)
    p_min, p_max = bounds.p_min, bounds.p_max
    upper_seq, lower_seq = split_upper_lower(srt, p_min, p_max)
    mine = set(srt)

    up_marks = yield from quick_half(
        ctx,
        upper_seq,
        p_min,
        p_max,
        lambda p: bounds.holder_of(p, members),
        mine,
    )

    neg_seq = sorted(negate(p) for p in lower_seq)
    neg_mine = {negate(p) for p in mine}
    low_marks_neg = yield from quick_half(
        ctx,
        neg_seq,
        negate(p_max),
        negate(p_min),
        lambda p: bounds.holder_of(negate(p), members),
        neg_mine,
    )
    low_marks = {negate(p) for p in low_marks_neg}

    result = yield from finish_hull(
        ctx, sorted(up_marks), sorted(low_marks), members
    )
    return result
