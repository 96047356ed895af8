"""Shared stages of the distributed hull algorithms.

Both hull protocols follow the same frame: global sort, batch-boundary
exchange, per-node work on a monotone half (upper or lower), then rank-based
compaction of the marked hull vertices into contiguous batches.  The lower
half always reuses the upper-half machinery through point negation.
"""
from __future__ import annotations

from dataclasses import dataclass

from .engine import NodeCtx
from .errors import ProtocolError
from .geometry import Point, lower_scan, orientation, upper_scan
from .primitives import all_gather_one, route


def negate(p: Point) -> Point:
    """Central reflection; maps the lower-hull problem onto the upper one."""
    return Point(-p.x, -p.y)


@dataclass(frozen=True)
class BatchBounds:
    """First and last point of every node's sorted batch, in node order."""

    firsts: tuple[Point, ...]
    lasts: tuple[Point, ...]

    @property
    def p_min(self) -> Point:
        return self.firsts[0]

    @property
    def p_max(self) -> Point:
        return self.lasts[-1]

    def holder_of(self, p: Point, members: range) -> int:
        """Node id owning p in its batch; lowest id on a boundary tie."""
        for k, node in enumerate(members):
            if self.firsts[k] <= p <= self.lasts[k]:
                return node
        raise ProtocolError(f"point {p} outside every batch")


def gather_bounds(ctx: NodeCtx, batch: list[Point], members: range):
    """All members learn every member's batch extremes; 1 round.

    Must be called by a member; disjoint groups may exchange concurrently.
    """
    if ctx.node not in members:
        raise ProtocolError(f"node {ctx.node} outside group {members}")
    if len(members) == 1:
        return BatchBounds((batch[0],), (batch[-1],))
    for dst in members:
        if dst != ctx.node:
            ctx.send(dst, "bounds", batch[0], batch[-1])
    inbox = yield
    pairs = {ctx.node: (batch[0], batch[-1])}
    for m in inbox:
        if m.tag == "bounds":
            pairs[m.src] = m.fields
    if len(pairs) != len(members):
        raise ProtocolError(f"bounds exchange incomplete at node {ctx.node}")
    return BatchBounds(
        tuple(pairs[i][0] for i in members), tuple(pairs[i][1] for i in members)
    )


def split_upper_lower(
    batch: list[Point], p_min: Point, p_max: Point
) -> tuple[list[Point], list[Point]]:
    """Partition a sorted batch against the chord; collinear points go to both."""
    upper: list[Point] = []
    lower: list[Point] = []
    for p in batch:
        side = orientation(p_min, p_max, p)
        if side >= 0:
            upper.append(p)
        if side <= 0:
            lower.append(p)
    return upper, lower


def column_tops(batch: list[Point], my_index: int, bounds: BatchBounds) -> list[Point]:
    """Global per-x maxima owned by this node's sorted batch slice.

    A column spanning a batch boundary belongs to the node holding its
    topmost point, so the last local column is kept only when the next
    batch starts in a different column.
    """
    tops: list[Point] = []
    for k, p in enumerate(batch):
        if k + 1 == len(batch) or batch[k + 1].x != p.x:
            tops.append(p)
    if tops and my_index + 1 < len(bounds.firsts):
        if bounds.firsts[my_index + 1].x == tops[-1].x:
            tops.pop()
    return tops


def upper_workset(batch: list[Point], my_index: int, bounds: BatchBounds) -> list[Point]:
    """Local strict upper hull of the node's global column maxima."""
    return upper_scan(column_tops(batch, my_index, bounds))


def column_bottoms(batch: list[Point], my_index: int, bounds: BatchBounds) -> list[Point]:
    """Global per-x minima owned by this node's sorted batch slice."""
    bottoms: list[Point] = []
    for k, p in enumerate(batch):
        if k == 0 or batch[k - 1].x != p.x:
            bottoms.append(p)
    if bottoms and my_index > 0:
        if bounds.lasts[my_index - 1].x == bottoms[0].x:
            bottoms.pop(0)
    return bottoms


def lower_workset(batch: list[Point], my_index: int, bounds: BatchBounds) -> list[Point]:
    """Local strict lower hull of the node's global column minima."""
    return lower_scan(column_bottoms(batch, my_index, bounds))


def far_point_key(p: Point, r: Point):
    """Max-order key for picking the point farthest above chord (p, r)."""

    def key(s: Point):
        return (
            (r.x - p.x) * (s.y - p.y) - (r.y - p.y) * (s.x - p.x),
            s.y,
            -s.x,
        )

    return key


def assemble_rank(
    upper_marked: list[Point],
    lower_marked: list[Point],
    counts: dict[int, tuple[int, int]],
    members: range,
    my_node: int,
) -> list[tuple[int, Point]]:
    """Global clockwise ranks of this node's marked hull vertices.

    The cycle is the upper path left-to-right followed by the lower path
    right-to-left with both shared endpoints dropped; upper and lower paths
    must each contain the shared extreme points exactly once.
    """
    up_before = 0
    low_after = 0
    total_low = 0
    seen_self = False
    for node in members:
        u, l = counts[node]
        total_low += l
        if node == my_node:
            seen_self = True
        elif not seen_self:
            up_before += u
        else:
            low_after += l
    total_up = sum(counts[node][0] for node in members)

    ranked: list[tuple[int, Point]] = []
    for k, p in enumerate(upper_marked):
        ranked.append((up_before + k, p))
    # Lower path arrives in ascending x; clockwise order walks it backwards,
    # skipping its last point (p_max, rank handled by the upper path) and
    # its first (p_min, the cycle start).
    pos_base = low_after + len(lower_marked)
    for k, p in enumerate(lower_marked):
        back = pos_base - 1 - k
        if back == total_low - 1 or back == 0:
            continue
        ranked.append((total_up + back - 1, p))
    return ranked


def compact_by_rank(ctx: NodeCtx, ranked, total: int, members: range, tag: str):
    """Route rank-labelled points into contiguous batches of n; 1 + cost rounds.

    Member k of the group receives ranks [k*n, (k+1)*n) and returns them in
    order.  Loads stay within n per endpoint by construction.
    """
    base = members.start
    records = []
    for rank, p in ranked:
        dst = base + rank // ctx.n
        records.append((dst, tag, (rank, p)))
    delivered = yield from route(ctx, records)
    got = [(f[0], f[1]) for src, t, f in delivered if t == tag]
    got.sort()
    return [p for _, p in got]


def finish_hull(ctx: NodeCtx, upper_path, lower_path, members: range):
    """Shared hull tail: gather path counts, rank, compact; returns (slice, h).

    upper_path must run p_min..p_max inclusive across members and lower_path
    likewise; both are per-node ascending slices.
    """
    if len(members) == 1:
        cycle = list(upper_path) + list(lower_path)[-2:0:-1]
        return cycle, len(cycle)
    counts = yield from all_gather_one(
        ctx, "path-size", len(upper_path), len(lower_path)
    )
    ranked = assemble_rank(upper_path, lower_path, counts, members, ctx.node)
    total_up = sum(counts[i][0] for i in members)
    total_low = sum(counts[i][1] for i in members)
    h = total_up + max(0, total_low - 2)
    my_slice = yield from compact_by_rank(ctx, ranked, h, members, "hull-v")
    return my_slice, h
