"""Logarithmic-round distributed hull via pairwise bridge binary searches.

Every node condenses its sorted batch to a small convex workset (the strict
upper hull of its global column maxima), every node pair runs a binary
search for the common supporting segment of their worksets, and each node
then locally discards workset points that some bridge proves interior.
The lower half reuses the same machinery on centrally reflected points.

The bridge search itself is a pure state machine (:class:`BridgeSearch`) so
it can be exercised and message-counted without the engine.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .engine import NodeCtx
from .errors import DuplicatePoint, ProtocolError
from .geometry import (
    COLLINEAR,
    LEFT,
    RIGHT,
    Point,
    orientation,
    tangent_index,
)
from .hull_common import (
    BatchBounds,
    finish_hull,
    gather_bounds,
    lower_workset,
    negate,
    upper_workset,
)
from .primitives import all_gather_one, sort_points


def _ceil_log2(x: int) -> int:
    return (x - 1).bit_length() if x > 1 else 0


def probe_slots(n: int) -> int:
    """Binary-search slots sufficient for any workset of at most n points."""
    return _ceil_log2(n) + 2


def tangent_touch(chain: Sequence[Point], p: Point) -> Point:
    """Rightmost vertex of the right-side chain touched by the upper tangent
    from p; p must lie strictly left of the chain."""
    return chain[tangent_index(p, chain, "left")]


@dataclass
class BridgeSearch:
    """Driver half of the bridge binary search, owning the left chain.

    Feed tangent touches for the current probe until ``done``; ``messages``
    counts one request plus one reply per probe and the final notification
    carrying the result to the responder.
    """

    chain: Sequence[Point]
    lo: int = 0
    hi: int = 0
    probe: int = 0
    done: bool = False
    left_point: Point | None = None
    right_point: Point | None = None
    messages: int = 0

    def __post_init__(self) -> None:
        if not self.chain:
            raise ProtocolError("bridge search over an empty chain")
        self.hi = len(self.chain) - 1
        self.probe = (self.lo + self.hi) // 2

    def probe_point(self) -> Point:
        return self.chain[self.probe]

    def feed_touch(self, touch: Point) -> bool:
        """Advance one iteration with the responder's tangent touch."""
        if self.done:
            return True
        self.messages += 2
        a = self.chain
        k = self.probe
        right_above = (
            k + 1 < len(a) and orientation(a[k], touch, a[k + 1]) == LEFT
        )
        left_above = k > 0 and orientation(a[k], touch, a[k - 1]) == LEFT
        if right_above:
            self.lo = k + 1
        elif left_above:
            self.hi = k - 1
        else:
            best = k
            if k > 0 and orientation(a[k], touch, a[k - 1]) == COLLINEAR:
                best = k - 1
            self.left_point = a[best]
            self.right_point = touch
            self.done = True
            self.messages += 1
            return True
        if self.lo > self.hi:
            raise ProtocolError("bridge search emptied its interval")
        self.probe = (self.lo + self.hi) // 2
        return False


def bridge_between(left_chain: Sequence[Point], right_chain: Sequence[Point]):
    """Run one search to completion locally; returns ((left, right), messages)."""
    search = BridgeSearch(left_chain)
    while not search.feed_touch(tangent_touch(right_chain, search.probe_point())):
        pass
    return (search.left_point, search.right_point), search.messages


def _slope(u: Point, v: Point) -> Fraction:
    return Fraction(v.y - u.y, v.x - u.x)


def prune_to_chain(
    workset: Sequence[Point], bridges: Sequence[tuple[Point, Point]]
) -> list[Point]:
    """Keep exactly the workset points that no bridge disqualifies.

    A point dies when a bridge segment spans its x with the point strictly
    below the segment (or on it without being an endpoint), or when it is an
    endpoint whose flattest incoming and steepest outgoing bridges fail to
    turn clockwise through it.
    """
    incoming: dict[Point, list[Point]] = {}
    outgoing: dict[Point, list[Point]] = {}
    for a, b in bridges:
        incoming.setdefault(b, []).append(a)
        outgoing.setdefault(a, []).append(b)

    survivors: list[Point] = []
    for v in workset:
        dead = False
        for a, b in bridges:
            if a.x < v.x < b.x and orientation(a, b, v) != LEFT:
                dead = True
                break
        if not dead and v in incoming and v in outgoing:
            u = min(incoming[v], key=lambda p: _slope(p, v))
            w = max(outgoing[v], key=lambda p: _slope(v, p))
            if orientation(u, v, w) != RIGHT:
                dead = True
        if not dead:
            survivors.append(v)
    return survivors


def _neg_chain(chain: Sequence[Point]) -> list[Point]:
    return [negate(p) for p in reversed(chain)]


def bridge_stage(
    ctx: NodeCtx,
    members: range,
    up_chain: list[Point],
    low_chain: list[Point],
    slots: int,
) -> Iterator:
    """Concurrent pairwise bridge searches inside one node group.

    For each member pair (l, m) with l < m, l drives the upper-side search
    and m drives the lower-side search on reflected chains, so every round
    carries at most one message per ordered pair.  Costs 1 round for the
    workset size exchange, 2 per probe slot, and 1 to publish results.

    Returns (upper_bridges, lower_bridges); each entry reads
    (left_owner, right_owner, left_point, right_point) and every bridge
    incident to this node is present.
    """
    me = ctx.node
    low_neg = _neg_chain(low_chain)
    sizes = yield from all_gather_one(
        ctx, "ws-size", len(up_chain), len(low_chain)
    )

    up_drv: dict[int, BridgeSearch] = {}
    low_drv: dict[int, BridgeSearch] = {}
    for m in members:
        if m > me and up_chain and sizes[m][0]:
            up_drv[m] = BridgeSearch(up_chain)
        if m < me and low_neg and sizes[m][1]:
            low_drv[m] = BridgeSearch(low_neg)

    pending_up = dict(up_drv)
    pending_low = dict(low_drv)
    for _ in range(slots):
        for m, s in pending_up.items():
            ctx.send(m, "bq-up", s.probe_point())
        for m, s in pending_low.items():
            ctx.send(m, "bq-low", s.probe_point())
        inbox = yield
        for msg in inbox:
            if msg.tag == "bq-up":
                ctx.send(msg.src, "bt-up", tangent_touch(up_chain, msg.fields[0]))
            elif msg.tag == "bq-low":
                ctx.send(msg.src, "bt-low", tangent_touch(low_neg, msg.fields[0]))
        inbox = yield
        for msg in inbox:
            if msg.tag == "bt-up":
                if pending_up[msg.src].feed_touch(msg.fields[0]):
                    del pending_up[msg.src]
            elif msg.tag == "bt-low":
                if pending_low[msg.src].feed_touch(msg.fields[0]):
                    del pending_low[msg.src]
    if pending_up or pending_low:
        raise ProtocolError(f"bridge searches outran the slot budget at {me}")

    upper = []
    lower = []
    for m, s in up_drv.items():
        upper.append((me, m, s.left_point, s.right_point))
        ctx.send(m, "bres-up", s.left_point, s.right_point)
    for m, s in low_drv.items():
        lower.append((m, me, negate(s.right_point), negate(s.left_point)))
        ctx.send(m, "bres-low", s.left_point, s.right_point)
    inbox = yield
    for msg in inbox:
        if msg.tag == "bres-up":
            upper.append((msg.src, me, msg.fields[0], msg.fields[1]))
        elif msg.tag == "bres-low":
            lower.append(
                (me, msg.src, negate(msg.fields[1]), negate(msg.fields[0]))
            )
    return upper, lower


def marked_paths(
    ctx: NodeCtx, batch: list[Point], members: range, bounds: BatchBounds
) -> Iterator:
    """Each member's slice of the hull's upper and lower vertex paths.

    The concatenation over members of the returned upper (lower) lists
    equals the sequential strict upper (lower) scan of the full point set,
    walls included.  Costs the bridge_stage rounds; zero with one member.
    """
    idx = members.index(ctx.node)
    w_up = upper_workset(batch, idx, bounds)
    w_low = lower_workset(batch, idx, bounds)

    if len(members) == 1:
        up_surv, low_surv = w_up, w_low
    else:
        up_bridges, low_bridges = yield from bridge_stage(
            ctx, members, w_up, w_low, probe_slots(ctx.n)
        )
        up_surv = prune_to_chain(w_up, [(a, b) for _, _, a, b in up_bridges])
        neg_ws = _neg_chain(w_low)
        neg_bridges = [(negate(b), negate(a)) for _, _, a, b in low_bridges]
        low_surv = [negate(p) for p in reversed(prune_to_chain(neg_ws, neg_bridges))]

    upper_path = list(up_surv)
    lower_path = list(low_surv)
    if idx == 0:
        first = batch[0]
        nxt = batch[1] if len(batch) > 1 else (
            bounds.firsts[1] if len(members) > 1 else None
        )
        if nxt is not None and nxt.x == first.x:
            upper_path.insert(0, first)
    if idx == len(members) - 1:
        last = batch[-1]
        prev = batch[-2] if len(batch) > 1 else (
            bounds.lasts[-2] if len(members) > 1 else None
        )
        if prev is not None and prev.x == last.x:
            lower_path.append(last)
    return upper_path, lower_path


def hull_from_sorted(ctx: NodeCtx, batch: list[Point], members: range) -> Iterator:
    """Distributed hull of already-sorted batches; returns (my_slice, h).

    The clockwise cycle starting at the lexicographic minimum is split into
    contiguous batches of at most n vertices over the first members.
    """
    bounds = yield from gather_bounds(ctx, batch, members)
    upper_path, lower_path = yield from marked_paths(ctx, batch, members, bounds)
    result = yield from finish_hull(ctx, upper_path, lower_path, members)
    return result


def log_hull_program(ctx: NodeCtx, batch: list[Point]) -> Iterator:
    """Node program: sort, pairwise bridge searches, prune, compact."""
    members = range(1, ctx.n + 1)
    if ctx.n == 1:
        srt = sorted(batch)
        for k in range(1, len(srt)):
            if srt[k] == srt[k - 1]:
                raise DuplicatePoint(f"repeated point {srt[k]}")
        result = yield from hull_from_sorted(ctx, srt, members)
        return result
    srt = yield from sort_points(ctx, batch)
    result = yield from hull_from_sorted(ctx, srt, members)
    return result
