"""Sequential reference checkers used to verify every distributed result."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

from .errors import DuplicatePoint
from .geometry import (
    COLLINEAR,
    LEFT,
    RIGHT,
    ConvexChain,
    Point,
    cross,
    is_supporting,
    lower_scan,
    on_segment,
    orientation,
    upper_scan,
)


def hull_oracle(points: Sequence[Point]) -> tuple[Point, ...]:
    """Strict convex hull as a clockwise cycle starting at the lex-min point."""
    pts = sorted(points)
    for i in range(1, len(pts)):
        if pts[i] == pts[i - 1]:
            raise DuplicatePoint(f"repeated point {pts[i]}")
    if len(pts) <= 2:
        return tuple(pts)
    upper = upper_scan(pts)
    lower = lower_scan(pts)
    return tuple(upper + lower[-2:0:-1])


def bridge_oracle(left: ConvexChain, right: ConvexChain) -> tuple[Point, Point]:
    """Exhaustive common supporting pair of two x-separated chains.

    All supporting pairs lie on one line; the returned pair is the
    outermost one (min-x on the left chain, max-x on the right chain).
    """
    assert left.kind == right.kind
    assert left.vertices and right.vertices
    assert left.vertices[-1].x < right.vertices[0].x
    good = [
        (a, b)
        for a in left.vertices
        for b in right.vertices
        if is_supporting(a, b, left) and is_supporting(a, b, right)
    ]
    assert good, "x-separated chains always admit a supporting pair"
    a0, b0 = good[0]
    for a, b in good[1:]:
        assert orientation(a0, b0, a) == COLLINEAR
        assert orientation(a0, b0, b) == COLLINEAR
    return (min(a for a, _ in good), max(b for _, b in good))


def general_position_check(points: Sequence[Point]) -> tuple[bool, tuple[Point, ...]]:
    """(ok, witness): witness is a collinear triple when ok is False."""
    pts = sorted(points)
    for i in range(1, len(pts)):
        if pts[i] == pts[i - 1]:
            raise DuplicatePoint(f"repeated point {pts[i]}")
    from math import gcd

    for i, a in enumerate(pts):
        seen: dict[tuple[int, int], Point] = {}
        for b in pts[i + 1 :]:
            dx, dy = b.x - a.x, b.y - a.y
            g = gcd(abs(dx), abs(dy))
            d = (dx // g, dy // g)
            if d in seen:
                return False, (a, seen[d], b)
            seen[d] = b
    return True, ()


@dataclass
class ValidationReport:
    """Outcome of the triangulation checks; failures carry (check, witness)."""

    passed: bool = True
    failures: list[tuple[str, str]] = field(default_factory=list)

    def fail(self, check: str, witness: str) -> None:
        self.passed = False
        self.failures.append((check, witness))


def _segments_conflict(a: Point, b: Point, c: Point, d: Point) -> bool:
    """True when closed segments ab and cd intersect anywhere except at a
    shared endpoint."""
    shared = {a, b} & {c, d}
    if len(shared) == 2:
        return True
    if shared:
        (s,) = shared
        p = b if a == s else a
        q = d if c == s else c
        # Collinear overlap past the shared endpoint is a conflict.
        return orientation(s, p, q) == COLLINEAR and (
            on_segment(q, s, p) or on_segment(p, s, q)
        ) and q != s and p != s
    o1, o2 = orientation(a, b, c), orientation(a, b, d)
    o3, o4 = orientation(c, d, a), orientation(c, d, b)
    if o1 != o2 and o3 != o4 and COLLINEAR not in (o1, o2, o3, o4):
        return True
    return (
        (o1 == COLLINEAR and on_segment(c, a, b))
        or (o2 == COLLINEAR and on_segment(d, a, b))
        or (o3 == COLLINEAR and on_segment(a, c, d))
        or (o4 == COLLINEAR and on_segment(b, c, d))
    )


def _point_in_triangle_interior(p: Point, t: tuple[Point, Point, Point]) -> bool:
    a, b, c = t
    return (
        orientation(a, b, p) == LEFT
        and orientation(b, c, p) == LEFT
        and orientation(c, a, p) == LEFT
    )


def triangulation_validator(
    points: Sequence[Point], triangles: Sequence[tuple[Point, Point, Point]]
) -> ValidationReport:
    """Exact full validation of a point-set triangulation.

    Checks vertex coverage both ways, pairwise non-crossing, area
    additivity against the hull, and the exact triangle / edge counts.
    """
    report = ValidationReport()
    pts = set(points)
    n_pts = len(points)
    hull = hull_oracle(points)
    h = len(hull)
    expected = max(0, 2 * n_pts - h - 2) if n_pts >= 3 else 0

    used: set[Point] = set()
    for t in triangles:
        for v in t:
            if v not in pts:
                report.fail("coverage", f"triangle vertex {v} is not an input point")
            used.add(v)
        if orientation(*t) != LEFT:
            report.fail("orientation", f"triangle {t} is not strictly counterclockwise")
    if n_pts >= 3 and expected > 0:
        missing = pts - used
        if missing:
            report.fail("coverage", f"points never used: {sorted(missing)[:3]}")

    if len(triangles) != expected:
        report.fail("count", f"{len(triangles)} triangles, expected {expected}")

    # Edge incidence: interior edges in exactly two triangles, hull edges in one.
    edge_count: dict[tuple[Point, Point], int] = defaultdict(int)
    for t in triangles:
        for i in range(3):
            a, b = t[i], t[(i + 1) % 3]
            edge_count[(min(a, b), max(a, b))] += 1
    hull_edges = {
        (min(hull[i], hull[(i + 1) % h]), max(hull[i], hull[(i + 1) % h]))
        for i in range(h)
    } if h >= 3 else set()
    if expected > 0:
        if len(edge_count) != 3 * n_pts - h - 3:
            report.fail(
                "edges", f"{len(edge_count)} distinct edges, expected {3 * n_pts - h - 3}"
            )
        for e, k in edge_count.items():
            want = 1 if e in hull_edges else 2
            if k != want:
                report.fail("edges", f"edge {e} appears {k} times, expected {want}")

    # Area additivity against the hull; the fan sign depends on the hull's
    # winding while the triangles are individually checked counterclockwise.
    if n_pts >= 3:
        hull_area2 = abs(
            sum(cross(hull[0], hull[i], hull[i + 1]) for i in range(1, h - 1))
        )
        tri_area2 = sum(cross(*t) for t in triangles)
        if tri_area2 != hull_area2:
            report.fail("area", f"doubled area {tri_area2} != hull {hull_area2}")

    # Exact pairwise crossing / containment checks with a coarse grid filter.
    boxes = []
    for t in triangles:
        xs = [v.x for v in t]
        ys = [v.y for v in t]
        boxes.append((min(xs), min(ys), max(xs), max(ys)))
    for i in range(len(triangles)):
        ti = triangles[i]
        bi = boxes[i]
        for j in range(i + 1, len(triangles)):
            bj = boxes[j]
            if bi[2] < bj[0] or bj[2] < bi[0] or bi[3] < bj[1] or bj[3] < bi[1]:
                continue
            tj = triangles[j]
            stop = False
            for u in range(3):
                for v in range(3):
                    a, b = ti[u], ti[(u + 1) % 3]
                    c, d = tj[v], tj[(v + 1) % 3]
                    if {a, b} == {c, d}:
                        continue
                    if _segments_conflict(a, b, c, d):
                        report.fail("crossing", f"edges {(a, b)} and {(c, d)} conflict")
                        stop = True
                        break
                if stop:
                    break
            if stop:
                continue
            if any(_point_in_triangle_interior(v, tj) for v in ti) or any(
                _point_in_triangle_interior(v, ti) for v in tj
            ):
                report.fail("crossing", f"triangles {ti} and {tj} overlap")
    return report
