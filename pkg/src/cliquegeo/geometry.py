"""Exact integer planar primitives: orientation, hull scans, tangent search.

All predicates use exact integer arithmetic; no floating point is involved
in any geometric decision.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import VerticalLine

LEFT = 1
RIGHT = -1
COLLINEAR = 0


class Point(NamedTuple):
    """Integer lattice point; tuple comparison gives lexicographic (x, y) order."""

    x: int
    y: int


def cross(a: Point, b: Point, c: Point) -> int:
    """Doubled signed area of triangle (a, b, c): (b - a) x (c - a)."""
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def orientation(a: Point, b: Point, c: Point) -> int:
    """LEFT when a->b->c turns counterclockwise, RIGHT when clockwise."""
    d = cross(a, b, c)
    if d > 0:
        return LEFT
    if d < 0:
        return RIGHT
    return COLLINEAR


def on_segment(p: Point, a: Point, b: Point) -> bool:
    """True when p lies on the closed segment ab."""
    if orientation(a, b, p) != COLLINEAR:
        return False
    return (
        min(a.x, b.x) <= p.x <= max(a.x, b.x)
        and min(a.y, b.y) <= p.y <= max(a.y, b.y)
    )


def upper_scan(points: Sequence[Point]) -> list[Point]:
    """Strict upper scan of lex-sorted distinct points.

    Result runs from the first input point to the last along the top;
    collinear interior points are removed (all kept turns are strict
    right turns).
    """
    chain: list[Point] = []
    for p in points:
        while len(chain) >= 2 and orientation(chain[-2], chain[-1], p) >= 0:
            chain.pop()
        chain.append(p)
    return chain


def lower_scan(points: Sequence[Point]) -> list[Point]:
    """Strict lower scan of lex-sorted distinct points (mirror of upper_scan)."""
    chain: list[Point] = []
    for p in points:
        while len(chain) >= 2 and orientation(chain[-2], chain[-1], p) <= 0:
            chain.pop()
        chain.append(p)
    return chain


@dataclass(frozen=True)
class ConvexChain:
    """x-monotone strict hull chain, kind 'upper' or 'lower'."""

    vertices: tuple[Point, ...]
    kind: str = "upper"

    def __len__(self) -> int:
        return len(self.vertices)

    def validate(self) -> None:
        v = self.vertices
        want = RIGHT if self.kind == "upper" else LEFT
        for i in range(1, len(v)):
            if v[i - 1] >= v[i]:
                raise ValueError("chain vertices not lex-increasing")
        for i in range(2, len(v)):
            if orientation(v[i - 2], v[i - 1], v[i]) != want:
                raise ValueError("chain turn is not strict")


@dataclass(frozen=True)
class Bridge:
    """Common supporting segment between two x-separated chains."""

    left: Point
    right: Point
    left_owner: int
    right_owner: int


def local_upper_hull(points: Sequence[Point]) -> ConvexChain:
    """Strict upper hull of a lex-sorted distinct point sequence."""
    return ConvexChain(tuple(upper_scan(points)), "upper")


def local_lower_hull(points: Sequence[Point]) -> ConvexChain:
    """Strict lower hull of a lex-sorted distinct point sequence."""
    return ConvexChain(tuple(lower_scan(points)), "lower")


def is_supporting(p: Point, q: Point, chain: ConvexChain) -> bool:
    """True when no chain vertex lies strictly above (upper) / below (lower) line pq."""
    if p.x == q.x:
        raise VerticalLine(f"supporting line through equal x {p.x} is vertical")
    a, b = (p, q) if p.x < q.x else (q, p)
    bad = LEFT if chain.kind == "upper" else RIGHT
    return all(orientation(a, b, v) != bad for v in chain.vertices)


def tangent_index(p: Point, chain: Sequence[Point], side: str) -> int:
    """Index of the vertex of a strict upper chain whose line through p supports it.

    side 'left' requires p.x strictly below every chain x and picks the
    rightmost touch vertex on slope ties; side 'right' is the mirror case
    and picks the leftmost touch vertex.
    """
    if side == "right":
        mirrored = [Point(-v.x, v.y) for v in reversed(chain)]
        return len(chain) - 1 - tangent_index(Point(-p.x, p.y), mirrored, "left")
    if p.x >= chain[0].x:
        raise VerticalLine(f"tangent source {p} not strictly left of chain")
    lo, hi = 0, len(chain) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if orientation(p, chain[mid], chain[mid + 1]) == RIGHT:
            hi = mid
        else:
            lo = mid + 1
    return lo
